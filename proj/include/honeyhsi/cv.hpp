#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "honeyhsi/dataset.hpp"
#include "honeyhsi/metrics.hpp"
#include "honeyhsi/pipeline.hpp"

namespace honeyhsi {

enum class Scenario { Instance, Image };
std::string toString(Scenario scenario);

struct CvReport {
    Scenario scenario = Scenario::Instance;
    std::vector<double> foldScores;  ///< balanced accuracy per fold, fold order
    double mean = 0.0;
    double stdDev = 0.0;
    std::vector<ConfusionMatrix> perFoldConfusions;
};

struct CvResult {
    PipelineConfig config;
    std::vector<std::string> classNames;  ///< classes of the evaluated (possibly transformed) dataset
    CvReport instance;
    CvReport image;
    std::vector<std::string> warnings;  ///< e.g. classes missing from a fold's training slice
    bool sampleStdDev = false;
};

struct CvOptions {
    /// Divide by n - 1 instead of n when aggregating fold scores.
    bool sampleStdDev = false;
    /// Worker threads for folds; 0 picks the hardware concurrency (capped at 20).
    unsigned threads = 0;
};

double meanOf(std::span<const double> values);
double stdDevOf(std::span<const double> values, bool sample = false);

/// Slices `ds` by the fold and fits the pipeline on the training side only.
FittedPipeline fitFold(const LabeledDataset& ds, const FoldSpec& fold, const PipelineConfig& config);

/// 20-fold acquisition cross-validation, scoring each fold instance-wise and by per-image
/// majority vote. Applies the class transformation first when config.classTransform is set.
/// Throws ArgumentError if the dataset is empty or lacks one of the six acquisitions.
CvResult runCv(const LabeledDataset& ds, const PipelineConfig& config, const CvOptions& options = {});

/// JSON report: config echo, class names, warnings, and per scenario the fold scores,
/// mean, std and fold confusion matrices.
nlohmann::json toJson(const CvResult& result);

/// Flat CSV `scenario,fold,balanced_accuracy`.
void writeFoldCsv(std::ostream& out, const CvResult& result);

}  // namespace honeyhsi
