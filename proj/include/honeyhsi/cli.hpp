#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "honeyhsi/cv.hpp"
#include "honeyhsi/dataset.hpp"
#include "honeyhsi/pipeline.hpp"

namespace honeyhsi::cli {

/// Process exit codes.
enum ExitCode : int {
    kSuccess = 0,
    kArgumentError = 2,
    kParseError = 3,
    kNumericalError = 4,
};

/// Maps a thrown library error to its exit code.
int exitCodeFor(const std::exception& error);

struct PrepareSummary {
    std::size_t classesBefore = 0;
    std::size_t classesAfter = 0;
    std::vector<BrandGroup> groups;
};

/// Relabels the input with the class transformation and writes it with a `class` column.
PrepareSummary cmdPrepare(const std::filesystem::path& input, const std::filesystem::path& output, double alpha,
                          std::ostream& log);

/// Runs cross-validation, prints mean ± std per scenario and, when `report` is set, writes the
/// JSON report there and the fold-score CSV next to it (same stem, .csv).
CvResult cmdEvaluate(const std::filesystem::path& input, const PipelineConfig& config,
                     const std::optional<std::filesystem::path>& report, std::ostream& log,
                     const CvOptions& options = {});

struct SweepRow {
    std::size_t components = 0;
    ClassifierKind classifier = ClassifierKind::Knn;
    double instanceMean = 0.0;
    double instanceStd = 0.0;
    double imageMean = 0.0;
    double imageStd = 0.0;
};

/// Cross-validates every (m, classifier) combination for m in [mMin, mMax] and writes
/// `m,classifier,mean_ba,std_ba,image_mean_ba,image_std_ba` rows to `csv`.
std::vector<SweepRow> cmdSweepComponents(const std::filesystem::path& input, const PipelineConfig& config,
                                         std::size_t mMin, std::size_t mMax,
                                         const std::vector<ClassifierKind>& classifiers, std::ostream& csv,
                                         const CvOptions& options = {});

/// Fits on the whole dataset and writes the bundle.
FittedPipeline cmdTrain(const std::filesystem::path& input, const PipelineConfig& config,
                        const std::filesystem::path& modelPath, std::ostream& log);

/// Classifies a sample CSV and prints the JSON response served by POST /classify.
nlohmann::json cmdClassify(const std::filesystem::path& modelPath, const std::filesystem::path& samplePath,
                           std::ostream& out);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace honeyhsi::cli
