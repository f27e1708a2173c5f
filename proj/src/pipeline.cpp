#include "honeyhsi/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "honeyhsi/error.hpp"

namespace honeyhsi {

using nlohmann::json;

std::string toString(ExtractorKind kind) {
    switch (kind) {
        case ExtractorKind::None: return "none";
        case ExtractorKind::Pca: return "pca";
        case ExtractorKind::Lda: return "lda";
    }
    return "none";
}

std::string toString(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::Knn: return "knn";
        case ClassifierKind::SvmLinear: return "svm-linear";
        case ClassifierKind::SvmRbf: return "svm-rbf";
    }
    return "knn";
}

ExtractorKind parseExtractorKind(std::string_view name) {
    if (name == "none") return ExtractorKind::None;
    if (name == "pca") return ExtractorKind::Pca;
    if (name == "lda") return ExtractorKind::Lda;
    throw ArgumentError("unknown extractor '" + std::string(name) + "' (expected none, pca or lda)");
}

ClassifierKind parseClassifierKind(std::string_view name) {
    if (name == "knn") return ClassifierKind::Knn;
    if (name == "svm-linear") return ClassifierKind::SvmLinear;
    if (name == "svm-rbf") return ClassifierKind::SvmRbf;
    throw ArgumentError("unknown classifier '" + std::string(name) + "' (expected knn, svm-linear or svm-rbf)");
}

void PipelineConfig::validate() const {
    if (components < 1) throw ArgumentError("components must be at least 1");
    if (k < 1) throw ArgumentError("k must be at least 1");
    if (!(c > 0.0)) throw ArgumentError("C must be positive");
    if (gamma && !(*gamma > 0.0)) throw ArgumentError("gamma must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
}

json toJson(const PipelineConfig& config) {
    return json{{"extractor", toString(config.extractor)},
                {"components", config.components},
                {"classifier", toString(config.classifier)},
                {"k", config.k},
                {"c", config.c},
                {"gamma", config.gamma ? json(*config.gamma) : json("auto")},
                {"alpha", config.alpha},
                {"class_transform", config.classTransform}};
}

PipelineConfig pipelineConfigFromJson(const json& doc) {
    if (!doc.is_object()) throw ArgumentError("pipeline config must be a JSON object");
    PipelineConfig config;
    try {
        if (doc.contains("extractor")) config.extractor = parseExtractorKind(doc.at("extractor").get<std::string>());
        if (doc.contains("components")) config.components = doc.at("components").get<std::size_t>();
        if (doc.contains("classifier")) config.classifier = parseClassifierKind(doc.at("classifier").get<std::string>());
        if (doc.contains("k")) config.k = doc.at("k").get<int>();
        if (doc.contains("c")) config.c = doc.at("c").get<double>();
        if (doc.contains("gamma")) {
            const auto& g = doc.at("gamma");
            if (g.is_string()) {
                if (g.get<std::string>() != "auto") throw ArgumentError("gamma must be 'auto' or a number");
                config.gamma.reset();
            } else {
                config.gamma = g.get<double>();
            }
        }
        if (doc.contains("alpha")) config.alpha = doc.at("alpha").get<double>();
        if (doc.contains("class_transform")) config.classTransform = doc.at("class_transform").get<bool>();
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("invalid pipeline config: ") + e.what());
    }
    config.validate();
    return config;
}

// ---------------------------------------------------------------------------

std::vector<double> FittedPipeline::extract(std::span<const double> bands) const {
    if (bands.size() != bandCount) {
        throw ShapeError("spectrum has " + std::to_string(bands.size()) + " bands, model expects " +
                         std::to_string(bandCount));
    }
    if (const auto* lda = std::get_if<LdaModel>(&extractor)) return projectLda(*lda, bands);
    if (const auto* pca = std::get_if<PcaModel>(&extractor)) return projectPca(*pca, bands);
    return {bands.begin(), bands.end()};
}

int FittedPipeline::predictIndex(std::span<const double> bands) const {
    const auto features = extract(bands);
    if (const auto* knn = std::get_if<KnnModel>(&classifier)) return knnPredictIndex(*knn, features);
    return svmPredictIndex(std::get<SvmMulticlassModel>(classifier), features);
}

std::string FittedPipeline::predict(std::span<const double> bands) const {
    return classNames[predictIndex(bands)];
}

FittedPipeline fitPipeline(const LabeledDataset& train, const PipelineConfig& config) {
    config.validate();
    if (train.empty()) throw FitError("cannot fit a pipeline on an empty training set");
    FittedPipeline pipeline;
    pipeline.config = config;
    pipeline.bandCount = train.bandCount();
    pipeline.classNames = train.classNames();

    const Matrix bands = bandMatrix(train);
    const auto labels = train.labelIndices();
    switch (config.extractor) {
        case ExtractorKind::None: break;
        case ExtractorKind::Pca: pipeline.extractor = fitPca(bands, config.components); break;
        case ExtractorKind::Lda: pipeline.extractor = fitLda(bands, labels, train.classNames(), config.components); break;
    }

    Matrix features = bands;
    if (config.extractor != ExtractorKind::None) {
        const std::size_t m = config.components;
        features = Matrix(bands.rows(), m);
        for (std::size_t i = 0; i < bands.rows(); ++i) {
            const auto f = pipeline.extract(bands.row(i));
            std::copy(f.begin(), f.end(), features.row(i).begin());
        }
    }

    switch (config.classifier) {
        case ClassifierKind::Knn:
            pipeline.classifier = fitKnn(std::move(features), labels, train.classNames(), config.k);
            break;
        case ClassifierKind::SvmLinear:
        case ClassifierKind::SvmRbf: {
            if (train.classNames().size() < 2) throw FitError("svm needs at least two classes in the training set");
            const Kernel kernel = config.classifier == ClassifierKind::SvmLinear
                                      ? Kernel::linear()
                                      : Kernel::rbf(config.gamma.value_or(autoGamma(features)));
            SvmOptions options;
            options.c = config.c;
            pipeline.classifier = fitSvmMulticlass(features, labels, train.classNames(), kernel, options);
            break;
        }
    }
    return pipeline;
}

// ---------------------------------------------------------------------------
// Bundles

json bundleToJson(const FittedPipeline& pipeline) {
    json extractor = json{{"kind", "none"}};
    if (const auto* lda = std::get_if<LdaModel>(&pipeline.extractor)) extractor = toJson(*lda);
    if (const auto* pca = std::get_if<PcaModel>(&pipeline.extractor)) extractor = toJson(*pca);
    json classifier = std::visit([](const auto& model) { return toJson(model); }, pipeline.classifier);
    return json{{"format", "honeyhsi-bundle"},
                {"version", kBundleVersion},
                {"band_count", pipeline.bandCount},
                {"class_names", pipeline.classNames},
                {"config", toJson(pipeline.config)},
                {"extractor", extractor},
                {"classifier", classifier}};
}

FittedPipeline bundleFromJson(const json& doc) {
    if (!doc.is_object() || doc.value("format", "") != "honeyhsi-bundle") {
        throw ParseError("not a honeyhsi model bundle");
    }
    if (doc.value("version", 0) != kBundleVersion) throw ParseError("unsupported bundle version");
    try {
        FittedPipeline pipeline;
        pipeline.bandCount = doc.at("band_count").get<std::size_t>();
        pipeline.classNames = doc.at("class_names").get<std::vector<std::string>>();
        pipeline.config = pipelineConfigFromJson(doc.at("config"));
        const auto& extractor = doc.at("extractor");
        const auto extractorKind = extractor.at("kind").get<std::string>();
        if (extractorKind == "lda") pipeline.extractor = ldaFromJson(extractor);
        else if (extractorKind == "pca") pipeline.extractor = pcaFromJson(extractor);
        else if (extractorKind != "none") throw ParseError("unknown extractor kind '" + extractorKind + "'");

        const auto& classifier = doc.at("classifier");
        const auto classifierKind = classifier.at("kind").get<std::string>();
        if (classifierKind == "knn") pipeline.classifier = knnFromJson(classifier);
        else if (classifierKind == "svm") pipeline.classifier = svmFromJson(classifier);
        else throw ParseError("unknown classifier kind '" + classifierKind + "'");
        return pipeline;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed bundle: ") + e.what());
    } catch (const ArgumentError& e) {
        throw ParseError(std::string("malformed bundle: ") + e.what());
    }
}

std::string serializeBundle(const FittedPipeline& pipeline) { return bundleToJson(pipeline).dump() + "\n"; }

void saveBundle(const FittedPipeline& pipeline, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write bundle to '" + path.string() + "'");
    out << serializeBundle(pipeline);
}

FittedPipeline loadBundle(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open bundle '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("bundle '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return bundleFromJson(doc);
}

// ---------------------------------------------------------------------------
// Sample classification

ClassifyResult classifySamples(const FittedPipeline& pipeline, std::span<const SampleRow> rows) {
    if (rows.empty()) throw ArgumentError("empty sample");
    ClassifyResult result;
    result.perInstance.reserve(rows.size());
    for (const auto& row : rows) result.perInstance.push_back(pipeline.predict(row.bands));
    const std::string& first = rows.front().imageId;
    bool sharedImage = !first.empty();
    for (const auto& row : rows) sharedImage = sharedImage && row.imageId == first;
    if (sharedImage) result.imageClass = majorityVoteImage(result.perInstance);
    return result;
}

ClassifyResult classifySampleCsv(const FittedPipeline& pipeline, std::string_view csv,
                                 std::vector<SampleRow>* parsedRows) {
    std::istringstream in{std::string(csv)};
    CsvOptions options;
    options.bandCount = pipeline.bandCount;
    auto rows = parseSampleCsv(in, options);
    auto result = classifySamples(pipeline, rows);
    if (parsedRows) *parsedRows = std::move(rows);
    return result;
}

json modelInfoJson(const FittedPipeline& pipeline) {
    std::size_t components = pipeline.bandCount;
    if (const auto* lda = std::get_if<LdaModel>(&pipeline.extractor)) components = lda->components();
    if (const auto* pca = std::get_if<PcaModel>(&pipeline.extractor)) components = pca->componentCount();
    return json{{"bundleVersion", kBundleVersion},
                {"classNames", pipeline.classNames},
                {"bandCount", pipeline.bandCount},
                {"extractor", toString(pipeline.config.extractor)},
                {"classifier", toString(pipeline.config.classifier)},
                {"components", components}};
}

json classifyResponseJson(const FittedPipeline& pipeline, const ClassifyResult& result,
                          std::span<const SampleRow> rows) {
    json echo = json::array();
    for (const auto& row : rows) echo.push_back(row.bands);
    json info = modelInfoJson(pipeline);
    json out{{"perInstance", result.perInstance},
             {"spectrumEcho", echo},
             {"modelInfo",
              {{"bundleVersion", info["bundleVersion"]},
               {"extractor", info["extractor"]},
               {"classifier", info["classifier"]}}}};
    if (result.imageClass) out["imageClass"] = *result.imageClass;
    return out;
}

}  // namespace honeyhsi
