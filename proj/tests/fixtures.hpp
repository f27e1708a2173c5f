#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "honeyhsi/dataset.hpp"
#include "oracles.hpp"

namespace honeyhsi::fixture {

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("honeyhsi-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void writeText(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string readText(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

inline std::string toCsv(const LabeledDataset& ds) {
    std::ostringstream out;
    writeCsv(out, ds);
    return out.str();
}

/// Small separable dataset with the full 128-band layout.
inline LabeledDataset smallReferenceLayout(std::size_t classes = 3, std::size_t instancesPerImage = 5,
                                           std::uint64_t seed = 5) {
    oracle::BlobSpec spec;
    spec.classes = classes;
    spec.bands = kReferenceBandCount;
    spec.imagesPerAcquisition = 2;
    spec.instancesPerImage = instancesPerImage;
    spec.seed = seed;
    return oracle::gaussianBlobs(spec);
}

/// Sample CSV (bands plus optional image_id) for the given spectra.
inline std::string sampleCsv(const std::vector<std::vector<double>>& spectra, const std::string& imageId = {}) {
    std::string out;
    if (!imageId.empty()) out += "image_id,";
    for (std::size_t i = 0; i < spectra.front().size(); ++i) out += (i ? "," : "") + bandColumnName(i);
    out += "\n";
    for (const auto& s : spectra) {
        if (!imageId.empty()) out += imageId + ",";
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::ostringstream v;
            v.precision(17);
            v << s[i];
            out += (i ? "," : "") + v.str();
        }
        out += "\n";
    }
    return out;
}

}  // namespace honeyhsi::fixture
