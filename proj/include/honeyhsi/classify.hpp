#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "honeyhsi/matrix.hpp"

namespace honeyhsi {

// ---------------------------------------------------------------------------
// Kernels

enum class KernelKind { Linear, Rbf };

struct Kernel {
    KernelKind kind = KernelKind::Linear;
    double gamma = 0.0;  ///< rbf only

    static Kernel linear() { return {KernelKind::Linear, 0.0}; }
    static Kernel rbf(double gamma) { return {KernelKind::Rbf, gamma}; }

    /// x·z for linear, exp(-γ‖x - z‖²) for rbf.
    double operator()(std::span<const double> x, std::span<const double> z) const;

    friend bool operator==(const Kernel&, const Kernel&) = default;
};

/// γ = 1 / (d · mean per-feature variance); 1.0 when the features are constant.
double autoGamma(const Matrix& features);

// ---------------------------------------------------------------------------
// K-nearest neighbours

struct KnnModel {
    int k = 5;
    Matrix points;  ///< one training feature vector per row
    std::vector<int> labels;  ///< indices into classNames
    std::vector<std::string> classNames;

    friend bool operator==(const KnnModel&, const KnnModel&) = default;
};

/// Stores the training set. Throws ArgumentError for k < 1 or mismatched sizes.
KnnModel fitKnn(Matrix points, std::vector<int> labels, std::vector<std::string> classNames, int k);

/// Majority class among the k nearest rows (Euclidean).
///
/// Equal distances are ordered by training-row position. A vote tie goes to the class
/// with the smaller summed neighbour distance, then to the smaller class name.
int knnPredictIndex(const KnnModel& model, std::span<const double> x);
std::string knnPredict(const KnnModel& model, std::span<const double> x);

// ---------------------------------------------------------------------------
// Support vector machines

struct SvmOptions {
    double c = 1.0;
    double tolerance = 1e-3;
    std::size_t maxPairUpdates = 1'000'000;
};

struct SvmBinaryModel {
    std::vector<std::vector<double>> supportVectors;
    std::vector<double> dualCoefs;  ///< α_n·y_n, nonzero
    double bias = 0.0;
    Kernel kernel;
    double c = 1.0;

    friend bool operator==(const SvmBinaryModel&, const SvmBinaryModel&) = default;
};

/// Solver state useful to tests and diagnostics.
struct SvmFitReport {
    std::vector<double> alphas;  ///< one multiplier per training point, including zeros
    std::size_t pairUpdates = 0;
    double maxViolation = 0.0;   ///< final max_{I_up}(-yG) - min_{I_low}(-yG)
    double dualObjective = 0.0;  ///< Σα - ½ΣΣ α_i α_j y_i y_j k(x_i, x_j)
};

/// Soft-margin SVM dual solved by SMO with maximal-violating-pair selection.
///
/// Labels must be ±1 with both signs present. Stops once the KKT gap is below
/// options.tolerance; the bias averages -y_i·G_i over free support vectors
/// (0 < α < C), or takes the midpoint of the feasible interval when none are free.
/// Throws FitError for invalid input and ConvergenceError after maxPairUpdates steps.
SvmBinaryModel fitSvmBinary(const Matrix& points, std::span<const int> labels, const Kernel& kernel,
                            const SvmOptions& options = {}, SvmFitReport* report = nullptr);

/// Σ_n dualCoefs[n]·k(sv_n, x) + bias.
double svmDecision(const SvmBinaryModel& model, std::span<const double> x);

/// One-vs-one ensemble. Pair models are ordered (0,1), (0,2), ..., (C-2,C-1); in pair (a, b)
/// class a is the positive side.
class SvmMulticlassModel {
public:
    SvmMulticlassModel() = default;
    SvmMulticlassModel(std::vector<std::string> classNames, std::vector<SvmBinaryModel> pairModels);

    const std::vector<std::string>& classNames() const noexcept { return classNames_; }
    const std::vector<SvmBinaryModel>& pairModels() const noexcept { return pairModels_; }
    const SvmBinaryModel& pair(std::size_t a, std::size_t b) const;

    /// Decision values of every pair model, in pair order. Kernel evaluations against
    /// support vectors shared by several pairs are computed once.
    std::vector<double> decisionValues(std::span<const double> x) const;

    std::size_t inputDim() const noexcept { return inputDim_; }

    friend bool operator==(const SvmMulticlassModel& l, const SvmMulticlassModel& r) {
        return l.classNames_ == r.classNames_ && l.pairModels_ == r.pairModels_;
    }

private:
    void buildPool();

    std::vector<std::string> classNames_;
    std::vector<SvmBinaryModel> pairModels_;
    std::size_t inputDim_ = 0;
    std::vector<std::vector<double>> pool_;
    std::vector<std::vector<std::size_t>> poolIndex_;  // per pair, per support vector

    friend nlohmann::json toJson(const SvmMulticlassModel& model);
};

/// Throws FitError (or ConvergenceError) tagged with the class pair that failed.
SvmMulticlassModel fitSvmMulticlass(const Matrix& points, std::span<const int> labels,
                                    std::vector<std::string> classNames, const Kernel& kernel,
                                    const SvmOptions& options = {});

/// One vote per pair model. Vote ties go to the larger sum of |decision| over the games each
/// tied class won, then to the smaller class name.
int svmPredictIndex(const SvmMulticlassModel& model, std::span<const double> x);
std::string svmPredict(const SvmMulticlassModel& model, std::span<const double> x);

// ---------------------------------------------------------------------------
// Image-level vote

/// Most frequent class; ties go to the smallest class name. Throws ArgumentError when empty.
std::string majorityVoteImage(std::span<const std::string> instancePredictions);

// ---------------------------------------------------------------------------
// Persistence

nlohmann::json toJson(const KnnModel& model);
nlohmann::json toJson(const SvmMulticlassModel& model);
nlohmann::json toJson(const Kernel& kernel);
KnnModel knnFromJson(const nlohmann::json& doc);
SvmMulticlassModel svmFromJson(const nlohmann::json& doc);
Kernel kernelFromJson(const nlohmann::json& doc);

}  // namespace honeyhsi
