#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "honeyhsi/classify.hpp"
#include "honeyhsi/dataset.hpp"
#include "honeyhsi/features.hpp"

namespace honeyhsi {

enum class ExtractorKind { None, Pca, Lda };
enum class ClassifierKind { Knn, SvmLinear, SvmRbf };

std::string toString(ExtractorKind kind);
std::string toString(ClassifierKind kind);
/// Throw ArgumentError on unknown names.
ExtractorKind parseExtractorKind(std::string_view name);
ClassifierKind parseClassifierKind(std::string_view name);

/// Extractor, classifier and hyperparameters of one experiment. Defaults: C = 1, K = 5,
/// 15 components, alpha = 0.05, automatic rbf gamma.
struct PipelineConfig {
    ExtractorKind extractor = ExtractorKind::Lda;
    std::size_t components = 15;
    ClassifierKind classifier = ClassifierKind::SvmRbf;
    int k = 5;
    double c = 1.0;
    std::optional<double> gamma;  ///< nullopt means auto
    double alpha = 0.05;
    bool classTransform = false;

    /// Throws ArgumentError when a field is out of range.
    void validate() const;

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

nlohmann::json toJson(const PipelineConfig& config);
/// Missing keys keep their defaults. Throws ArgumentError on bad values.
PipelineConfig pipelineConfigFromJson(const nlohmann::json& doc);

/// Feature extraction and classifier fitted together on one training set.
struct FittedPipeline {
    PipelineConfig config;
    std::size_t bandCount = 0;
    std::vector<std::string> classNames;
    std::variant<std::monostate, PcaModel, LdaModel> extractor;
    std::variant<KnnModel, SvmMulticlassModel> classifier;

    std::vector<double> extract(std::span<const double> bands) const;
    int predictIndex(std::span<const double> bands) const;
    std::string predict(std::span<const double> bands) const;
};

/// Fits the configured extractor on `train`, then the classifier on the extracted features.
FittedPipeline fitPipeline(const LabeledDataset& train, const PipelineConfig& config);

inline constexpr int kBundleVersion = 1;

/// Versioned model bundle: config, band count, class map, extractor and classifier documents.
nlohmann::json bundleToJson(const FittedPipeline& pipeline);
FittedPipeline bundleFromJson(const nlohmann::json& doc);
std::string serializeBundle(const FittedPipeline& pipeline);
void saveBundle(const FittedPipeline& pipeline, const std::filesystem::path& path);
FittedPipeline loadBundle(const std::filesystem::path& path);

/// Predictions for a submitted sample; shared by the CLI and the HTTP service.
struct ClassifyResult {
    std::vector<std::string> perInstance;
    std::optional<std::string> imageClass;  ///< set iff every row carries the same non-empty image_id
};

ClassifyResult classifySamples(const FittedPipeline& pipeline, std::span<const SampleRow> rows);

/// Parses sample CSV text against the bundle's band count and classifies it.
ClassifyResult classifySampleCsv(const FittedPipeline& pipeline, std::string_view csv,
                                 std::vector<SampleRow>* parsedRows = nullptr);

/// Bundle metadata reported to clients.
nlohmann::json modelInfoJson(const FittedPipeline& pipeline);

/// {perInstance, imageClass, spectrumEcho, modelInfo}; imageClass is omitted when absent.
nlohmann::json classifyResponseJson(const FittedPipeline& pipeline, const ClassifyResult& result,
                                    std::span<const SampleRow> rows);

}  // namespace honeyhsi
