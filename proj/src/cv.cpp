#include "honeyhsi/cv.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include "honeyhsi/error.hpp"

namespace honeyhsi {

using nlohmann::json;

std::string toString(Scenario scenario) { return scenario == Scenario::Instance ? "instance" : "image"; }

double meanOf(std::span<const double> values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double stdDevOf(std::span<const double> values, bool sample) {
    const std::size_t n = values.size();
    if (n == 0 || (sample && n < 2)) return 0.0;
    const double mean = meanOf(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(sample ? n - 1 : n));
}

FittedPipeline fitFold(const LabeledDataset& ds, const FoldSpec& fold, const PipelineConfig& config) {
    auto [train, test] = sliceFold(ds, fold);
    return fitPipeline(train, config);
}

namespace {

struct FoldOutcome {
    ConfusionMatrix instance;
    ConfusionMatrix image;
    std::vector<std::string> warnings;
};

FoldOutcome evaluateFold(const LabeledDataset& ds, const FoldSpec& fold, const PipelineConfig& config) {
    auto [train, test] = sliceFold(ds, fold);
    FoldOutcome outcome{ConfusionMatrix(ds.classNames()), ConfusionMatrix(ds.classNames()), {}};
    if (train.empty()) throw ArgumentError("fold " + std::to_string(fold.foldIndex) + " has an empty training slice");

    for (const auto& name : test.classNames()) {
        if (train.classIndex(name) < 0) {
            outcome.warnings.push_back("fold " + std::to_string(fold.foldIndex) + ": class '" + name +
                                       "' is absent from the training slice");
        }
    }

    const FittedPipeline pipeline = fitPipeline(train, config);

    struct ImageVotes {
        int trueClass = -1;
        std::vector<std::string> predictions;
    };
    std::map<std::string, ImageVotes> images;
    for (const auto& inst : test.instances()) {
        const int truth = ds.classIndex(inst.classLabel);
        const std::string predicted = pipeline.predict(inst.bands);
        outcome.instance.add(static_cast<std::size_t>(truth), static_cast<std::size_t>(ds.classIndex(predicted)));

        auto& votes = images[inst.imageId];
        if (votes.trueClass >= 0 && votes.trueClass != truth) {
            throw ArgumentError("image '" + inst.imageId + "' mixes class labels");
        }
        votes.trueClass = truth;
        votes.predictions.push_back(predicted);
    }
    for (const auto& [id, votes] : images) {
        const std::string winner = majorityVoteImage(votes.predictions);
        outcome.image.add(static_cast<std::size_t>(votes.trueClass), static_cast<std::size_t>(ds.classIndex(winner)));
    }
    return outcome;
}

CvReport assemble(Scenario scenario, std::vector<ConfusionMatrix> confusions, bool sampleStd) {
    CvReport report;
    report.scenario = scenario;
    for (const auto& cm : confusions) report.foldScores.push_back(balancedAccuracy(cm));
    report.mean = meanOf(report.foldScores);
    report.stdDev = stdDevOf(report.foldScores, sampleStd);
    report.perFoldConfusions = std::move(confusions);
    return report;
}

}  // namespace

CvResult runCv(const LabeledDataset& input, const PipelineConfig& config, const CvOptions& options) {
    config.validate();
    if (input.empty()) throw ArgumentError("cross-validation on an empty dataset");
    std::set<int> acquisitions;
    for (const auto& inst : input.instances()) acquisitions.insert(inst.acquisition);
    if (acquisitions.size() != static_cast<std::size_t>(kAcquisitionCount)) {
        throw ArgumentError("cross-validation needs instances from all six acquisitions");
    }
    const LabeledDataset ds = config.classTransform ? transformClasses(input, config.alpha) : input;

    const auto folds = makeFolds();
    std::vector<FoldOutcome> outcomes(folds.size());
    std::vector<std::exception_ptr> failures(folds.size());

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(folds.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t f = next++; f < folds.size(); f = next++) {
            try {
                outcomes[f] = evaluateFold(ds, folds[f], config);
            } catch (...) {
                failures[f] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }

    CvResult result;
    result.config = config;
    result.classNames = ds.classNames();
    result.sampleStdDev = options.sampleStdDev;
    std::vector<ConfusionMatrix> instanceCms;
    std::vector<ConfusionMatrix> imageCms;
    for (auto& outcome : outcomes) {
        instanceCms.push_back(std::move(outcome.instance));
        imageCms.push_back(std::move(outcome.image));
        result.warnings.insert(result.warnings.end(), outcome.warnings.begin(), outcome.warnings.end());
    }
    result.instance = assemble(Scenario::Instance, std::move(instanceCms), options.sampleStdDev);
    result.image = assemble(Scenario::Image, std::move(imageCms), options.sampleStdDev);
    return result;
}

json toJson(const CvResult& result) {
    auto scenarioJson = [](const CvReport& report) {
        json confusions = json::array();
        for (const auto& cm : report.perFoldConfusions) confusions.push_back(toJson(cm)["counts"]);
        return json{{"scenario", toString(report.scenario)},
                    {"fold_scores", report.foldScores},
                    {"mean", report.mean},
                    {"std", report.stdDev},
                    {"fold_confusions", confusions}};
    };
    return json{{"config", toJson(result.config)},
                {"class_names", result.classNames},
                {"folds", makeFolds().size()},
                {"std_divisor", result.sampleStdDev ? "n-1" : "n"},
                {"warnings", result.warnings},
                {"scenarios", json::array({scenarioJson(result.instance), scenarioJson(result.image)})}};
}

void writeFoldCsv(std::ostream& out, const CvResult& result) {
    out << "scenario,fold,balanced_accuracy\n";
    for (const CvReport* report : {&result.instance, &result.image}) {
        for (std::size_t f = 0; f < report->foldScores.size(); ++f) {
            out << toString(report->scenario) << ',' << f << ',' << json(report->foldScores[f]).dump() << '\n';
        }
    }
}

}  // namespace honeyhsi
