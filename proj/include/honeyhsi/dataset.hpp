#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace honeyhsi {

inline constexpr std::size_t kReferenceBandCount = 128;
inline constexpr int kAcquisitionCount = 6;

/// One reflectance spectrum with the identity of the image it was extracted from.
struct SpectralInstance {
    std::vector<double> bands;
    std::string origin;
    std::string brand;
    int acquisition = 1;  ///< 1..6
    std::string imageId;
    std::string classLabel;  ///< origin, or "<brand>_<origin>" after class transformation

    friend bool operator==(const SpectralInstance&, const SpectralInstance&) = default;
};

/// Instance collection whose class list is always the sorted set of labels present.
class LabeledDataset {
public:
    LabeledDataset() = default;
    explicit LabeledDataset(std::vector<SpectralInstance> instances);

    const std::vector<SpectralInstance>& instances() const noexcept { return instances_; }
    const std::vector<std::string>& classNames() const noexcept { return classNames_; }
    std::size_t size() const noexcept { return instances_.size(); }
    bool empty() const noexcept { return instances_.empty(); }
    /// Band count of the first instance, 0 when empty.
    std::size_t bandCount() const noexcept;

    /// Index of `label` in classNames(), or -1.
    int classIndex(std::string_view label) const;

    /// Per-instance class indices aligned with instances().
    std::vector<int> labelIndices() const;

    std::vector<std::string> distinctOrigins() const;
    std::vector<std::string> distinctImageIds() const;

private:
    std::vector<SpectralInstance> instances_;
    std::vector<std::string> classNames_;
};

struct FoldSpec {
    int foldIndex = 0;
    std::array<int, 3> trainAcquisitions{};
    std::array<int, 3> testAcquisitions{};

    bool isTrain(int acquisition) const;
    friend bool operator==(const FoldSpec&, const FoldSpec&) = default;
};

struct CsvOptions {
    std::size_t bandCount = kReferenceBandCount;
};

/// Band column name for a 0-based band index: 0 -> "b001".
std::string bandColumnName(std::size_t index);

/// Parses the dataset schema `origin,brand,acquisition,image_id,b001..bNNN[,class]`.
///
/// Columns are located by header name and may appear in any order. When an optional
/// `class` column is present it becomes the class label, otherwise the label is the origin.
/// Throws ParseError (BandCountError for a wrong number of band columns) naming row and column.
LabeledDataset parseCsv(std::istream& in, const CsvOptions& options = {});
LabeledDataset loadCsv(const std::filesystem::path& path, const CsvOptions& options = {});

/// A spectrum submitted for classification: bands plus whatever identity columns were supplied.
struct SampleRow {
    std::vector<double> bands;
    std::string imageId;  ///< empty when the sample has no image_id column
};

/// Parses a classification sample: band columns b001..bNNN are required, every other
/// column is optional. Throws ParseError on malformed text or an empty sample and
/// BandCountError when the header carries a band count other than options.bandCount.
std::vector<SampleRow> parseSampleCsv(std::istream& in, const CsvOptions& options = {});

/// Writes the dataset schema with the class label appended as a `class` column.
void writeCsv(std::ostream& out, const LabeledDataset& ds);

/// Two-sided paired t-test between the band-wise mean spectra of two brands of one origin.
/// Throws LookupError if either brand has no instances under that origin.
double brandPairPValue(const LabeledDataset& ds, std::string_view origin, std::string_view brandA,
                       std::string_view brandB);

/// Brands of one origin that were merged into a single class.
struct BrandGroup {
    std::string origin;
    std::vector<std::string> brands;  ///< sorted
    std::string classLabel;
};

struct ClassTransformResult {
    LabeledDataset dataset;
    std::vector<BrandGroup> groups;  ///< ordered by origin, then representative brand
};

/// Splits each origin into brand groups that the paired t-test cannot tell apart (p >= alpha,
/// closed transitively). Origins left with a single group keep their origin label; the others
/// relabel every instance as "<smallest brand in group>_<origin>".
ClassTransformResult transformClassesDetailed(const LabeledDataset& ds, double alpha);
LabeledDataset transformClasses(const LabeledDataset& ds, double alpha);

/// All 20 three-acquisition training subsets of {1..6} in lexicographic order.
std::vector<FoldSpec> makeFolds();

/// Partitions by acquisition. Throws ParseError if one image id spans several acquisitions.
std::pair<LabeledDataset, LabeledDataset> sliceFold(const LabeledDataset& ds, const FoldSpec& fold);

}  // namespace honeyhsi
