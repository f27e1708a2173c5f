#include "honeyhsi/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "honeyhsi/error.hpp"
#include "honeyhsi/service.hpp"

namespace honeyhsi::cli {

using nlohmann::json;

int exitCodeFor(const std::exception& error) {
    if (dynamic_cast<const ArgumentError*>(&error)) return kArgumentError;
    if (dynamic_cast<const ParseError*>(&error) || dynamic_cast<const LookupError*>(&error)) return kParseError;
    return kNumericalError;
}

namespace {

std::ofstream openOutput(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path.string() + "'");
    return out;
}

std::string number(double v) { return json(v).dump(); }

}  // namespace

PrepareSummary cmdPrepare(const std::filesystem::path& input, const std::filesystem::path& output, double alpha,
                          std::ostream& log) {
    const LabeledDataset ds = loadCsv(input);
    const auto transformed = transformClassesDetailed(ds, alpha);
    auto out = openOutput(output);
    writeCsv(out, transformed.dataset);

    PrepareSummary summary{ds.distinctOrigins().size(), transformed.dataset.classNames().size(), transformed.groups};
    log << "classes: " << summary.classesBefore << " origins -> " << summary.classesAfter << " classes (alpha "
        << number(alpha) << ")\n";
    for (const auto& group : summary.groups) {
        if (group.brands.size() < 2) continue;
        log << "merged " << group.origin << ":";
        for (const auto& b : group.brands) log << ' ' << b;
        log << " -> " << group.classLabel << '\n';
    }
    return summary;
}

CvResult cmdEvaluate(const std::filesystem::path& input, const PipelineConfig& config,
                     const std::optional<std::filesystem::path>& report, std::ostream& log, const CvOptions& options) {
    const LabeledDataset ds = loadCsv(input);
    CvResult result = runCv(ds, config, options);
    const json doc = toJson(result);
    if (report) {
        auto out = openOutput(*report);
        out << doc.dump(2) << '\n';
        auto csvPath = *report;
        csvPath.replace_extension(".csv");
        auto csv = openOutput(csvPath);
        writeFoldCsv(csv, result);
    }
    log << "config: " << toJson(config).dump() << '\n';
    for (const auto& scenario : doc.at("scenarios")) {
        log << scenario.at("scenario").get<std::string>() << ": mean = " << scenario.at("mean").dump()
            << " ± " << scenario.at("std").dump() << '\n';
    }
    for (const auto& w : result.warnings) log << "warning: " << w << '\n';
    return result;
}

std::vector<SweepRow> cmdSweepComponents(const std::filesystem::path& input, const PipelineConfig& config,
                                         std::size_t mMin, std::size_t mMax,
                                         const std::vector<ClassifierKind>& classifiers, std::ostream& csv,
                                         const CvOptions& options) {
    if (config.extractor == ExtractorKind::None) throw ArgumentError("sweep needs an lda or pca extractor");
    if (classifiers.empty()) throw ArgumentError("sweep needs at least one classifier");
    LabeledDataset ds = loadCsv(input);
    if (config.classTransform) ds = transformClasses(ds, config.alpha);
    const std::size_t upper =
        config.extractor == ExtractorKind::Lda ? ds.classNames().size() - 1 : ds.bandCount();
    if (mMin < 1 || mMin > mMax || mMax > upper) {
        throw ArgumentError("component range " + std::to_string(mMin) + ".." + std::to_string(mMax) +
                            " must lie within 1.." + std::to_string(upper));
    }
    PipelineConfig base = config;
    base.classTransform = false;  // already applied

    std::vector<SweepRow> rows;
    csv << "m,classifier,mean_ba,std_ba,image_mean_ba,image_std_ba\n";
    for (std::size_t m = mMin; m <= mMax; ++m) {
        for (ClassifierKind kind : classifiers) {
            PipelineConfig cfg = base;
            cfg.components = m;
            cfg.classifier = kind;
            const CvResult r = runCv(ds, cfg, options);
            SweepRow row{m, kind, r.instance.mean, r.instance.stdDev, r.image.mean, r.image.stdDev};
            csv << m << ',' << toString(kind) << ',' << number(row.instanceMean) << ',' << number(row.instanceStd)
                << ',' << number(row.imageMean) << ',' << number(row.imageStd) << '\n';
            rows.push_back(row);
        }
    }
    return rows;
}

FittedPipeline cmdTrain(const std::filesystem::path& input, const PipelineConfig& config,
                        const std::filesystem::path& modelPath, std::ostream& log) {
    config.validate();
    LabeledDataset ds = loadCsv(input);
    if (config.classTransform) ds = transformClasses(ds, config.alpha);
    FittedPipeline pipeline = fitPipeline(ds, config);
    saveBundle(pipeline, modelPath);
    log << "trained " << toString(config.extractor) << " + " << toString(config.classifier) << " on " << ds.size()
        << " instances, " << pipeline.classNames.size() << " classes -> " << modelPath.string() << '\n';
    return pipeline;
}

json cmdClassify(const std::filesystem::path& modelPath, const std::filesystem::path& samplePath, std::ostream& out) {
    const FittedPipeline pipeline = loadBundle(modelPath);
    std::ifstream in(samplePath, std::ios::binary);
    if (!in) throw ParseError("cannot open sample '" + samplePath.string() + "'");
    std::stringstream text;
    text << in.rdbuf();
    std::vector<SampleRow> rows;
    const auto result = classifySampleCsv(pipeline, text.str(), &rows);
    json response = classifyResponseJson(pipeline, result, rows);
    out << response.dump() << '\n';
    return response;
}

// ---------------------------------------------------------------------------

namespace {

struct ConfigFlags {
    std::string configPath;
    std::string extractor;
    std::size_t components = 0;
    std::string classifier;
    int k = 0;
    double c = 0.0;
    std::string gamma;
    double alpha = 0.0;
    bool classTransform = false;

    CLI::Option* extractorOpt = nullptr;
    CLI::Option* componentsOpt = nullptr;
    CLI::Option* classifierOpt = nullptr;
    CLI::Option* kOpt = nullptr;
    CLI::Option* cOpt = nullptr;
    CLI::Option* gammaOpt = nullptr;
    CLI::Option* alphaOpt = nullptr;
    CLI::Option* transformOpt = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", configPath, "Pipeline config JSON; explicit flags override it");
        extractorOpt = cmd->add_option("--extractor", extractor, "none | pca | lda (default lda)");
        componentsOpt = cmd->add_option("--components", components, "Extracted components (default 15)");
        classifierOpt = cmd->add_option("--classifier", classifier, "knn | svm-linear | svm-rbf (default svm-rbf)");
        kOpt = cmd->add_option("--k", k, "KNN neighbours (default 5)");
        cOpt = cmd->add_option("--c", c, "SVM regularization C (default 1)");
        gammaOpt = cmd->add_option("--gamma", gamma, "RBF gamma or 'auto' (default auto)");
        alphaOpt = cmd->add_option("--alpha", alpha, "t-test significance level (default 0.05)");
        transformOpt = cmd->add_flag("--class-transform", classTransform, "Split origins into brand classes first");
    }

    PipelineConfig resolve() const {
        PipelineConfig config;
        if (!configPath.empty()) {
            std::ifstream in(configPath);
            if (!in) throw ArgumentError("cannot open config '" + configPath + "'");
            try {
                config = pipelineConfigFromJson(json::parse(in));
            } catch (const json::exception& e) {
                throw ArgumentError("config '" + configPath + "' is not valid JSON: " + e.what());
            }
        }
        if (extractorOpt->count()) config.extractor = parseExtractorKind(extractor);
        if (componentsOpt->count()) config.components = components;
        if (classifierOpt->count()) config.classifier = parseClassifierKind(classifier);
        if (kOpt->count()) config.k = k;
        if (cOpt->count()) config.c = c;
        if (gammaOpt->count()) {
            if (gamma == "auto") {
                config.gamma.reset();
            } else {
                try {
                    config.gamma = std::stod(gamma);
                } catch (const std::exception&) {
                    throw ArgumentError("gamma must be 'auto' or a number");
                }
            }
        }
        if (alphaOpt->count()) config.alpha = alpha;
        if (transformOpt->count()) config.classTransform = classTransform;
        config.validate();
        return config;
    }
};

std::vector<ClassifierKind> parseClassifierList(const std::string& text) {
    std::vector<ClassifierKind> out;
    if (text == "all") return {ClassifierKind::Knn, ClassifierKind::SvmLinear, ClassifierKind::SvmRbf};
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(parseClassifierKind(item));
    }
    return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hyperspectral honey classification: class transformation, LDA/PCA features, KNN/SVM, "
                 "acquisition cross-validation"};
    app.require_subcommand(1);

    std::string input;
    std::string output;
    double prepareAlpha = 0.05;
    auto* prepare = app.add_subcommand("prepare", "Apply the t-test class transformation to a dataset CSV");
    prepare->add_option("--input", input, "Dataset CSV")->required();
    prepare->add_option("--output", output, "Relabelled CSV to write")->required();
    prepare->add_option("--alpha", prepareAlpha, "Significance level (default 0.05)");

    ConfigFlags evalFlags;
    std::string reportPath;
    bool sampleStd = false;
    unsigned threads = 0;
    auto* evaluate = app.add_subcommand("evaluate", "20-fold acquisition cross-validation");
    evaluate->add_option("--input", input, "Dataset CSV")->required();
    evalFlags.attach(evaluate);
    evaluate->add_option("--report", reportPath, "JSON report path (fold CSV written alongside)");
    evaluate->add_flag("--sample-std", sampleStd, "Use the n-1 divisor for the fold standard deviation");
    evaluate->add_option("--threads", threads, "Fold worker threads (0 = auto)");

    ConfigFlags sweepFlags;
    std::size_t mMin = 1;
    std::size_t mMax = 20;
    std::string sweepClassifiers = "all";
    std::string sweepOut;
    auto* sweep = app.add_subcommand("sweep", "Cross-validated accuracy for a range of component counts");
    sweep->add_option("--input", input, "Dataset CSV")->required();
    sweepFlags.attach(sweep);
    sweep->add_option("--m-min", mMin, "Smallest component count (default 1)");
    sweep->add_option("--m-max", mMax, "Largest component count (default 20)");
    sweep->add_option("--classifiers", sweepClassifiers, "Comma list or 'all' (default all)");
    sweep->add_option("--out", sweepOut, "CSV output path (default stdout)");
    sweep->add_option("--threads", threads, "Fold worker threads (0 = auto)");

    ConfigFlags trainFlags;
    std::string modelPath;
    auto* train = app.add_subcommand("train", "Fit a pipeline on the full dataset and write a model bundle");
    train->add_option("--input", input, "Dataset CSV")->required();
    trainFlags.attach(train);
    train->add_option("--out", modelPath, "Bundle path")->required();

    std::string samplePath;
    auto* classify = app.add_subcommand("classify", "Classify the spectra of a sample CSV with a bundle");
    classify->add_option("--model", modelPath, "Bundle path")->required();
    classify->add_option("--sample", samplePath, "Sample CSV")->required();

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* serveCmd = app.add_subcommand("serve", "Serve a bundle over HTTP");
    serveCmd->add_option("--model", modelPath, "Bundle path")->required();
    serveCmd->add_option("--port", port, "TCP port (default 8080)");
    serveCmd->add_option("--host", host, "Bind address (default 127.0.0.1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kArgumentError;
    }

    try {
        if (prepare->parsed()) {
            cmdPrepare(input, output, prepareAlpha, out);
        } else if (evaluate->parsed()) {
            CvOptions options;
            options.sampleStdDev = sampleStd;
            options.threads = threads;
            std::optional<std::filesystem::path> report;
            if (!reportPath.empty()) report = reportPath;
            cmdEvaluate(input, evalFlags.resolve(), report, out, options);
        } else if (sweep->parsed()) {
            CvOptions options;
            options.threads = threads;
            const auto config = sweepFlags.resolve();
            const auto kinds = parseClassifierList(sweepClassifiers);
            if (sweepOut.empty()) {
                cmdSweepComponents(input, config, mMin, mMax, kinds, out, options);
            } else {
                std::ofstream csv(sweepOut);
                if (!csv) throw ArgumentError("cannot write '" + sweepOut + "'");
                cmdSweepComponents(input, config, mMin, mMax, kinds, csv, options);
            }
        } else if (train->parsed()) {
            cmdTrain(input, trainFlags.resolve(), modelPath, out);
        } else if (classify->parsed()) {
            cmdClassify(modelPath, samplePath, out);
        } else if (serveCmd->parsed()) {
            ClassifyService service(loadBundle(modelPath));
            out << "serving " << modelPath << " on http://" << host << ":" << port << '\n' << std::flush;
            serve(service, host, port);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exitCodeFor(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalError;
    }
    return kSuccess;
}

}  // namespace honeyhsi::cli
