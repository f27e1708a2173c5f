#include "honeyhsi/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <unordered_map>

#include "honeyhsi/error.hpp"
#include "honeyhsi/special.hpp"

namespace honeyhsi {

// ---------------------------------------------------------------------------
// LabeledDataset

LabeledDataset::LabeledDataset(std::vector<SpectralInstance> instances) : instances_(std::move(instances)) {
    std::set<std::string> labels;
    for (const auto& inst : instances_) labels.insert(inst.classLabel);
    classNames_.assign(labels.begin(), labels.end());
}

std::size_t LabeledDataset::bandCount() const noexcept {
    return instances_.empty() ? 0 : instances_.front().bands.size();
}

int LabeledDataset::classIndex(std::string_view label) const {
    auto it = std::lower_bound(classNames_.begin(), classNames_.end(), label);
    if (it == classNames_.end() || *it != label) return -1;
    return static_cast<int>(it - classNames_.begin());
}

std::vector<int> LabeledDataset::labelIndices() const {
    std::vector<int> out;
    out.reserve(instances_.size());
    for (const auto& inst : instances_) out.push_back(classIndex(inst.classLabel));
    return out;
}

std::vector<std::string> LabeledDataset::distinctOrigins() const {
    std::set<std::string> s;
    for (const auto& inst : instances_) s.insert(inst.origin);
    return {s.begin(), s.end()};
}

std::vector<std::string> LabeledDataset::distinctImageIds() const {
    std::set<std::string> s;
    for (const auto& inst : instances_) s.insert(inst.imageId);
    return {s.begin(), s.end()};
}

bool FoldSpec::isTrain(int acquisition) const {
    return std::find(trainAcquisitions.begin(), trainAcquisitions.end(), acquisition) != trainAcquisitions.end();
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> splitCsvLine(std::string_view line, std::size_t row) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", row);
    fields.push_back(std::move(current));
    for (auto& f : fields) {
        const auto first = f.find_first_not_of(" \t");
        const auto last = f.find_last_not_of(" \t");
        f = first == std::string::npos ? std::string{} : f.substr(first, last - first + 1);
    }
    return fields;
}

bool readLine(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

bool isBlank(std::string_view line) {
    return line.find_first_not_of(" \t") == std::string_view::npos;
}

double parseReal(const std::string& text, std::size_t row, const std::string& column) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (begin != end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ParseError("'" + text + "' is not a number", row, column);
    }
    if (!std::isfinite(value)) throw ParseError("band value is not finite", row, column);
    return value;
}

int parseAcquisition(const std::string& text, std::size_t row) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw ParseError("'" + text + "' is not an integer", row, "acquisition");
    }
    if (value < 1 || value > kAcquisitionCount) {
        throw ParseError("acquisition " + text + " outside 1..6", row, "acquisition");
    }
    return value;
}

bool isBandColumnName(std::string_view name) {
    return name.size() >= 2 && name[0] == 'b' &&
           std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; });
}

struct HeaderLayout {
    std::size_t fieldCount = 0;
    std::vector<std::size_t> bandColumns;  // position of b001..bNNN in order
    std::optional<std::size_t> origin, brand, acquisition, imageId, classLabel;
};

// Locates columns by name. `requireIdentity` makes origin/brand/acquisition/image_id mandatory.
HeaderLayout readHeader(const std::vector<std::string>& header, const CsvOptions& options, bool requireIdentity) {
    HeaderLayout layout;
    layout.fieldCount = header.size();
    std::map<std::string, std::size_t> byName;
    std::size_t bandColumnCount = 0;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!byName.emplace(header[i], i).second) throw ParseError("duplicate column", 1, header[i]);
        if (isBandColumnName(header[i])) ++bandColumnCount;
    }
    auto find = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = byName.find(name);
        if (it == byName.end()) return std::nullopt;
        return it->second;
    };
    layout.origin = find("origin");
    layout.brand = find("brand");
    layout.acquisition = find("acquisition");
    layout.imageId = find("image_id");
    layout.classLabel = find("class");
    if (requireIdentity) {
        for (const char* name : {"origin", "brand", "acquisition", "image_id"}) {
            if (!find(name)) throw ParseError("missing column", 1, name);
        }
    }
    if (bandColumnCount == 0) throw ParseError("no band columns (expected b001..)", 1);
    if (bandColumnCount != options.bandCount) {
        throw BandCountError("found " + std::to_string(bandColumnCount) + " band columns, expected " +
                                 std::to_string(options.bandCount),
                             1);
    }
    for (std::size_t b = 0; b < options.bandCount; ++b) {
        const std::string name = bandColumnName(b);
        auto pos = find(name);
        if (!pos) throw ParseError("missing column", 1, name);
        layout.bandColumns.push_back(*pos);
    }
    return layout;
}

std::vector<double> readBands(const std::vector<std::string>& fields, const HeaderLayout& layout,
                              std::size_t row) {
    std::vector<double> bands;
    bands.reserve(layout.bandColumns.size());
    for (std::size_t b = 0; b < layout.bandColumns.size(); ++b) {
        bands.push_back(parseReal(fields[layout.bandColumns[b]], row, bandColumnName(b)));
    }
    return bands;
}

std::string quoteIfNeeded(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    return out + "\"";
}

void stripBom(std::string& line) {
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
        line.erase(0, 3);
    }
}

}  // namespace

std::string bandColumnName(std::size_t index) {
    std::string digits = std::to_string(index + 1);
    if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
    return "b" + digits;
}

LabeledDataset parseCsv(std::istream& in, const CsvOptions& options) {
    std::string line;
    if (!readLine(in, line)) throw ParseError("empty file: header required", 1);
    stripBom(line);
    const HeaderLayout layout = readHeader(splitCsvLine(line, 1), options, true);

    struct ImageIdentity {
        std::string origin, brand;
        int acquisition;
    };
    std::unordered_map<std::string, ImageIdentity> images;

    std::vector<SpectralInstance> instances;
    std::size_t row = 1;
    while (readLine(in, line)) {
        ++row;
        if (isBlank(line)) continue;
        const auto fields = splitCsvLine(line, row);
        if (fields.size() != layout.fieldCount) {
            throw ParseError("expected " + std::to_string(layout.fieldCount) + " fields, found " +
                                 std::to_string(fields.size()),
                             row);
        }
        SpectralInstance inst;
        inst.origin = fields[*layout.origin];
        inst.brand = fields[*layout.brand];
        inst.acquisition = parseAcquisition(fields[*layout.acquisition], row);
        inst.imageId = fields[*layout.imageId];
        if (inst.origin.empty()) throw ParseError("empty value", row, "origin");
        if (inst.imageId.empty()) throw ParseError("empty value", row, "image_id");
        inst.bands = readBands(fields, layout, row);
        inst.classLabel = layout.classLabel ? fields[*layout.classLabel] : inst.origin;
        if (inst.classLabel.empty()) throw ParseError("empty value", row, "class");

        auto [it, inserted] = images.emplace(inst.imageId, ImageIdentity{inst.origin, inst.brand, inst.acquisition});
        if (!inserted && (it->second.origin != inst.origin || it->second.brand != inst.brand ||
                          it->second.acquisition != inst.acquisition)) {
            throw ParseError("image '" + inst.imageId + "' reappears with a different origin, brand or acquisition",
                             row, "image_id");
        }
        instances.push_back(std::move(inst));
    }
    return LabeledDataset(std::move(instances));
}

LabeledDataset loadCsv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    return parseCsv(in, options);
}

std::vector<SampleRow> parseSampleCsv(std::istream& in, const CsvOptions& options) {
    std::string line;
    while (readLine(in, line)) {
        stripBom(line);
        if (!isBlank(line)) break;
        line.clear();
    }
    if (isBlank(line)) throw ArgumentError("empty sample: no header and no rows");
    const HeaderLayout layout = readHeader(splitCsvLine(line, 1), options, false);

    std::vector<SampleRow> rows;
    std::size_t row = 1;
    while (readLine(in, line)) {
        ++row;
        if (isBlank(line)) continue;
        const auto fields = splitCsvLine(line, row);
        if (fields.size() != layout.fieldCount) {
            throw ParseError("expected " + std::to_string(layout.fieldCount) + " fields, found " +
                                 std::to_string(fields.size()),
                             row);
        }
        SampleRow sample;
        sample.bands = readBands(fields, layout, row);
        if (layout.imageId) sample.imageId = fields[*layout.imageId];
        rows.push_back(std::move(sample));
    }
    if (rows.empty()) throw ArgumentError("empty sample: header has no data rows");
    return rows;
}

void writeCsv(std::ostream& out, const LabeledDataset& ds) {
    const std::size_t bands = ds.bandCount();
    out << "origin,brand,acquisition,image_id";
    for (std::size_t b = 0; b < bands; ++b) out << ',' << bandColumnName(b);
    out << ",class\n";
    char buffer[64];
    for (const auto& inst : ds.instances()) {
        out << quoteIfNeeded(inst.origin) << ',' << quoteIfNeeded(inst.brand) << ',' << inst.acquisition << ','
            << quoteIfNeeded(inst.imageId);
        for (double v : inst.bands) {
            auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, v);
            out << ',' << std::string_view(buffer, ptr - buffer);
        }
        out << ',' << quoteIfNeeded(inst.classLabel) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Class transformation

namespace {

std::vector<double> meanSpectrum(const LabeledDataset& ds, std::string_view origin, std::string_view brand) {
    std::vector<double> sum;
    std::size_t count = 0;
    for (const auto& inst : ds.instances()) {
        if (inst.origin != origin || inst.brand != brand) continue;
        if (sum.empty()) sum.assign(inst.bands.size(), 0.0);
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += inst.bands[k];
        ++count;
    }
    for (double& v : sum) v /= static_cast<double>(count);
    return sum;
}

// Paired t-test over band-wise differences of two mean spectra.
double pairedSpectraPValue(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    if (n < 2) throw DomainError("paired t-test needs at least two bands");
    double scale = 0.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sum += a[k] - b[k];
        scale = std::max({scale, std::abs(a[k]), std::abs(b[k])});
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double dev = (a[k] - b[k]) - mean;
        ss += dev * dev;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    // Below this the differences are constant up to rounding.
    const double zeroLevel = 1e-12 * std::max(scale, 1e-300);
    if (sd <= zeroLevel) return std::abs(mean) <= zeroLevel ? 1.0 : 0.0;
    const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
    return studentTTwoSided(t, static_cast<double>(n - 1));
}

struct UnionFind {
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> parent;
};

}  // namespace

double brandPairPValue(const LabeledDataset& ds, std::string_view origin, std::string_view brandA,
                       std::string_view brandB) {
    const auto a = meanSpectrum(ds, origin, brandA);
    if (a.empty()) {
        throw LookupError("brand '" + std::string(brandA) + "' has no instances under origin '" +
                          std::string(origin) + "'");
    }
    const auto b = meanSpectrum(ds, origin, brandB);
    if (b.empty()) {
        throw LookupError("brand '" + std::string(brandB) + "' has no instances under origin '" +
                          std::string(origin) + "'");
    }
    return pairedSpectraPValue(a, b);
}

ClassTransformResult transformClassesDetailed(const LabeledDataset& ds, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");

    std::map<std::string, std::set<std::string>> brandsByOrigin;
    for (const auto& inst : ds.instances()) brandsByOrigin[inst.origin].insert(inst.brand);

    std::map<std::pair<std::string, std::string>, std::string> labelFor;  // (origin, brand) -> class
    ClassTransformResult result;
    for (const auto& [origin, brandSet] : brandsByOrigin) {
        const std::vector<std::string> brands(brandSet.begin(), brandSet.end());
        std::vector<std::vector<double>> means;
        for (const auto& brand : brands) means.push_back(meanSpectrum(ds, origin, brand));

        UnionFind groups(brands.size());
        for (std::size_t i = 0; i < brands.size(); ++i)
            for (std::size_t j = i + 1; j < brands.size(); ++j)
                if (pairedSpectraPValue(means[i], means[j]) >= alpha) groups.unite(i, j);

        // Roots are the smallest index in each group, i.e. the lexicographically smallest brand.
        std::map<std::size_t, std::vector<std::string>> members;
        for (std::size_t i = 0; i < brands.size(); ++i) members[groups.find(i)].push_back(brands[i]);
        for (const auto& [root, names] : members) {
            const std::string label = members.size() == 1 ? origin : brands[root] + "_" + origin;
            for (const auto& brand : names) labelFor[{origin, brand}] = label;
            result.groups.push_back({origin, names, label});
        }
    }

    std::vector<SpectralInstance> relabeled = ds.instances();
    for (auto& inst : relabeled) inst.classLabel = labelFor.at({inst.origin, inst.brand});
    result.dataset = LabeledDataset(std::move(relabeled));
    return result;
}

LabeledDataset transformClasses(const LabeledDataset& ds, double alpha) {
    return transformClassesDetailed(ds, alpha).dataset;
}

// ---------------------------------------------------------------------------
// Folds

std::vector<FoldSpec> makeFolds() {
    std::vector<FoldSpec> folds;
    for (int a = 1; a <= kAcquisitionCount; ++a) {
        for (int b = a + 1; b <= kAcquisitionCount; ++b) {
            for (int c = b + 1; c <= kAcquisitionCount; ++c) {
                FoldSpec fold;
                fold.foldIndex = static_cast<int>(folds.size());
                fold.trainAcquisitions = {a, b, c};
                std::size_t t = 0;
                for (int acq = 1; acq <= kAcquisitionCount; ++acq) {
                    if (acq != a && acq != b && acq != c) fold.testAcquisitions[t++] = acq;
                }
                folds.push_back(fold);
            }
        }
    }
    return folds;
}

std::pair<LabeledDataset, LabeledDataset> sliceFold(const LabeledDataset& ds, const FoldSpec& fold) {
    std::unordered_map<std::string, int> acquisitionOfImage;
    std::vector<SpectralInstance> train;
    std::vector<SpectralInstance> test;
    for (const auto& inst : ds.instances()) {
        auto [it, inserted] = acquisitionOfImage.emplace(inst.imageId, inst.acquisition);
        if (!inserted && it->second != inst.acquisition) {
            throw ParseError("image '" + inst.imageId + "' spans acquisitions " + std::to_string(it->second) +
                             " and " + std::to_string(inst.acquisition));
        }
        (fold.isTrain(inst.acquisition) ? train : test).push_back(inst);
    }
    return {LabeledDataset(std::move(train)), LabeledDataset(std::move(test))};
}

}  // namespace honeyhsi
