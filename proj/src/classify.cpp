#include "honeyhsi/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "honeyhsi/error.hpp"
#include "honeyhsi/features.hpp"

namespace honeyhsi {

using nlohmann::json;

namespace {

constexpr int kModelVersion = 1;
constexpr double kStoredCoefFloor = 1e-12;
constexpr double kMinCurvature = 1e-12;

void requireDim(std::size_t expected, std::size_t actual) {
    if (expected != actual) {
        throw ShapeError("feature vector has " + std::to_string(actual) + " entries, model expects " +
                         std::to_string(expected));
    }
}

double squaredDistance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        sum += diff * diff;
    }
    return sum;
}

}  // namespace

double Kernel::operator()(std::span<const double> x, std::span<const double> z) const {
    if (kind == KernelKind::Linear) {
        double dot = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * z[i];
        return dot;
    }
    return std::exp(-gamma * squaredDistance(x, z));
}

double autoGamma(const Matrix& features) {
    const std::size_t n = features.rows();
    const std::size_t d = features.cols();
    if (n == 0 || d == 0) return 1.0;
    double varianceSum = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) mean += features(r, c);
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) ss += (features(r, c) - mean) * (features(r, c) - mean);
        varianceSum += ss / static_cast<double>(n);
    }
    const double meanVariance = varianceSum / static_cast<double>(d);
    if (!(meanVariance > 0.0)) return 1.0;
    return 1.0 / (static_cast<double>(d) * meanVariance);
}

// ---------------------------------------------------------------------------
// KNN

KnnModel fitKnn(Matrix points, std::vector<int> labels, std::vector<std::string> classNames, int k) {
    if (k < 1) throw ArgumentError("knn: k must be at least 1");
    if (points.rows() == 0) throw FitError("knn: empty training set");
    if (labels.size() != points.rows()) throw ShapeError("knn: label count differs from point count");
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= classNames.size()) throw FitError("knn: label out of range");
    }
    return KnnModel{k, std::move(points), std::move(labels), std::move(classNames)};
}

int knnPredictIndex(const KnnModel& model, std::span<const double> x) {
    const std::size_t n = model.points.rows();
    if (n == 0) throw ArgumentError("knn: model has no training points");
    requireDim(model.points.cols(), x.size());

    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = {squaredDistance(model.points.row(i), x), i};
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(model.k), n);
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

    std::map<int, std::pair<int, double>> votes;  // class -> (count, summed distance)
    for (std::size_t i = 0; i < k; ++i) {
        auto& v = votes[model.labels[dist[i].second]];
        ++v.first;
        v.second += std::sqrt(dist[i].first);
    }
    int best = -1;
    for (const auto& [cls, tally] : votes) {
        if (best < 0) {
            best = cls;
            continue;
        }
        const auto& bestTally = votes[best];
        if (tally.first != bestTally.first) {
            if (tally.first > bestTally.first) best = cls;
        } else if (tally.second != bestTally.second) {
            if (tally.second < bestTally.second) best = cls;
        } else if (model.classNames[cls] < model.classNames[best]) {
            best = cls;
        }
    }
    return best;
}

std::string knnPredict(const KnnModel& model, std::span<const double> x) {
    return model.classNames[knnPredictIndex(model, x)];
}

// ---------------------------------------------------------------------------
// SMO

namespace {

class SmoSolver {
public:
    SmoSolver(const Matrix& points, std::span<const int> labels, const Kernel& kernel, double c)
        : points_(points), y_(labels.begin(), labels.end()), kernel_(kernel), c_(c), n_(points.rows()),
          alpha_(n_, 0.0), gradient_(n_, -1.0), rows_(n_), diag_(n_) {
        for (std::size_t i = 0; i < n_; ++i) diag_[i] = kernel_(points_.row(i), points_.row(i));
    }

    void solve(double tolerance, std::size_t maxUpdates) {
        for (;;) {
            const auto [i, j, gap] = selectPair();
            violation_ = gap;
            if (gap < tolerance) return;
            if (updates_ >= maxUpdates) {
                throw ConvergenceError("SMO did not converge after " + std::to_string(updates_) +
                                       " pair updates (max KKT violation " + std::to_string(gap) + ")");
            }
            step(i, j);
            ++updates_;
        }
    }

    double bias() const {
        double sum = 0.0;
        std::size_t free = 0;
        for (std::size_t t = 0; t < n_; ++t) {
            if (alpha_[t] > 0.0 && alpha_[t] < c_) {
                sum += -y_[t] * gradient_[t];
                ++free;
            }
        }
        if (free > 0) return sum / static_cast<double>(free);
        const auto [i, j, gap] = selectPair();
        (void)gap;
        const double upper = i < n_ ? -y_[i] * gradient_[i] : 0.0;
        const double lower = j < n_ ? -y_[j] * gradient_[j] : 0.0;
        return 0.5 * (upper + lower);
    }

    double dualObjective() const {
        // f(α) = ½αᵀQα - eᵀα and G = Qα - e, so ½αᵀQα = ½αᵀ(G + e).
        double linear = 0.0;
        double quadratic = 0.0;
        for (std::size_t t = 0; t < n_; ++t) {
            linear += alpha_[t];
            quadratic += alpha_[t] * (gradient_[t] + 1.0);
        }
        return linear - 0.5 * quadratic;
    }

    const std::vector<double>& alphas() const { return alpha_; }
    std::size_t updates() const { return updates_; }
    double violation() const { return violation_; }

private:
    struct Selection {
        std::size_t i, j;
        double gap;
    };

    bool inUp(std::size_t t) const { return y_[t] > 0 ? alpha_[t] < c_ : alpha_[t] > 0.0; }
    bool inLow(std::size_t t) const { return y_[t] > 0 ? alpha_[t] > 0.0 : alpha_[t] < c_; }

    Selection selectPair() const {
        double maxUp = -std::numeric_limits<double>::infinity();
        double minLow = std::numeric_limits<double>::infinity();
        std::size_t i = n_;
        std::size_t j = n_;
        for (std::size_t t = 0; t < n_; ++t) {
            const double v = -y_[t] * gradient_[t];
            if (inUp(t) && v > maxUp) {
                maxUp = v;
                i = t;
            }
            if (inLow(t) && v < minLow) {
                minLow = v;
                j = t;
            }
        }
        if (i == n_ || j == n_) return {i, j, 0.0};
        return {i, j, maxUp - minLow};
    }

    // Row of Q = y_i y_t K(x_i, x_t), computed on first use.
    const std::vector<double>& qRow(std::size_t i) {
        auto& row = rows_[i];
        if (row.empty()) {
            row.resize(n_);
            const auto xi = points_.row(i);
            for (std::size_t t = 0; t < n_; ++t) row[t] = y_[i] * y_[t] * kernel_(xi, points_.row(t));
        }
        return row;
    }

    void step(std::size_t i, std::size_t j) {
        const auto& qi = qRow(i);
        const auto& qj = qRow(j);
        const double oldI = alpha_[i];
        const double oldJ = alpha_[j];
        double ai = oldI;
        double aj = oldJ;

        if (y_[i] != y_[j]) {
            double quad = diag_[i] + diag_[j] + 2.0 * qi[j];
            if (quad <= 0.0) quad = kMinCurvature;
            const double delta = (-gradient_[i] - gradient_[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = -diff;
            }
            if (diff > 0.0) {
                if (ai > c_) {
                    ai = c_;
                    aj = c_ - diff;
                }
            } else if (aj > c_) {
                aj = c_;
                ai = c_ + diff;
            }
        } else {
            double quad = diag_[i] + diag_[j] - 2.0 * qi[j];
            if (quad <= 0.0) quad = kMinCurvature;
            const double delta = (gradient_[i] - gradient_[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > c_) {
                if (ai > c_) {
                    ai = c_;
                    aj = sum - c_;
                }
            } else if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (sum > c_) {
                if (aj > c_) {
                    aj = c_;
                    ai = sum - c_;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }
        alpha_[i] = ai;
        alpha_[j] = aj;
        const double di = ai - oldI;
        const double dj = aj - oldJ;
        for (std::size_t t = 0; t < n_; ++t) gradient_[t] += qi[t] * di + qj[t] * dj;
    }

    const Matrix& points_;
    std::vector<double> y_;
    Kernel kernel_;
    double c_;
    std::size_t n_;
    std::vector<double> alpha_;
    std::vector<double> gradient_;  // G = Qα - e
    std::vector<std::vector<double>> rows_;
    std::vector<double> diag_;
    std::size_t updates_ = 0;
    double violation_ = 0.0;
};

}  // namespace

SvmBinaryModel fitSvmBinary(const Matrix& points, std::span<const int> labels, const Kernel& kernel,
                            const SvmOptions& options, SvmFitReport* report) {
    if (labels.size() != points.rows()) throw ShapeError("svm: label count differs from point count");
    if (!(options.c > 0.0)) throw ArgumentError("svm: C must be positive");
    if (kernel.kind == KernelKind::Rbf && !(kernel.gamma > 0.0)) throw ArgumentError("svm: gamma must be positive");
    bool positive = false;
    bool negative = false;
    for (int y : labels) {
        if (y == 1) positive = true;
        else if (y == -1) negative = true;
        else throw FitError("svm: binary labels must be +1 or -1");
    }
    if (!positive || !negative) throw FitError("svm: both classes must be present");

    SmoSolver solver(points, labels, kernel, options.c);
    solver.solve(options.tolerance, options.maxPairUpdates);

    SvmBinaryModel model;
    model.kernel = kernel;
    model.c = options.c;
    model.bias = solver.bias();
    const auto& alphas = solver.alphas();
    for (std::size_t t = 0; t < alphas.size(); ++t) {
        const double coef = alphas[t] * labels[t];
        if (std::abs(coef) <= kStoredCoefFloor) continue;
        const auto row = points.row(t);
        model.supportVectors.emplace_back(row.begin(), row.end());
        model.dualCoefs.push_back(coef);
    }
    if (report) {
        report->alphas = alphas;
        report->pairUpdates = solver.updates();
        report->maxViolation = solver.violation();
        report->dualObjective = solver.dualObjective();
    }
    return model;
}

double svmDecision(const SvmBinaryModel& model, std::span<const double> x) {
    if (!model.supportVectors.empty()) requireDim(model.supportVectors.front().size(), x.size());
    double sum = model.bias;
    for (std::size_t n = 0; n < model.supportVectors.size(); ++n) {
        sum += model.dualCoefs[n] * model.kernel(model.supportVectors[n], x);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// One-vs-one

namespace {

std::size_t pairCount(std::size_t classes) { return classes * (classes - 1) / 2; }

std::size_t pairOffset(std::size_t a, std::size_t b, std::size_t classes) {
    // Pairs enumerated row by row over a < b.
    return a * classes - a * (a + 1) / 2 + (b - a - 1);
}

}  // namespace

SvmMulticlassModel::SvmMulticlassModel(std::vector<std::string> classNames, std::vector<SvmBinaryModel> pairModels)
    : classNames_(std::move(classNames)), pairModels_(std::move(pairModels)) {
    if (classNames_.size() < 2) throw ArgumentError("svm: at least two classes are required");
    if (pairModels_.size() != pairCount(classNames_.size())) {
        throw ArgumentError("svm: expected " + std::to_string(pairCount(classNames_.size())) + " pair models, got " +
                            std::to_string(pairModels_.size()));
    }
    buildPool();
}

void SvmMulticlassModel::buildPool() {
    std::map<std::vector<double>, std::size_t> seen;
    pool_.clear();
    poolIndex_.assign(pairModels_.size(), {});
    inputDim_ = 0;
    for (std::size_t p = 0; p < pairModels_.size(); ++p) {
        for (const auto& sv : pairModels_[p].supportVectors) {
            if (inputDim_ == 0) inputDim_ = sv.size();
            if (sv.size() != inputDim_) throw ShapeError("svm: support vectors differ in length");
            auto [it, inserted] = seen.emplace(sv, pool_.size());
            if (inserted) pool_.push_back(sv);
            poolIndex_[p].push_back(it->second);
        }
    }
}

const SvmBinaryModel& SvmMulticlassModel::pair(std::size_t a, std::size_t b) const {
    if (a >= b || b >= classNames_.size()) throw ArgumentError("svm: invalid class pair");
    return pairModels_[pairOffset(a, b, classNames_.size())];
}

std::vector<double> SvmMulticlassModel::decisionValues(std::span<const double> x) const {
    if (inputDim_ != 0) requireDim(inputDim_, x.size());
    const Kernel& kernel = pairModels_.front().kernel;
    std::vector<double> kvalues(pool_.size());
    for (std::size_t s = 0; s < pool_.size(); ++s) kvalues[s] = kernel(pool_[s], x);
    std::vector<double> out(pairModels_.size());
    for (std::size_t p = 0; p < pairModels_.size(); ++p) {
        const auto& model = pairModels_[p];
        double sum = model.bias;
        for (std::size_t n = 0; n < model.dualCoefs.size(); ++n) sum += model.dualCoefs[n] * kvalues[poolIndex_[p][n]];
        out[p] = sum;
    }
    return out;
}

SvmMulticlassModel fitSvmMulticlass(const Matrix& points, std::span<const int> labels,
                                    std::vector<std::string> classNames, const Kernel& kernel,
                                    const SvmOptions& options) {
    const std::size_t classes = classNames.size();
    if (classes < 2) throw FitError("svm: at least two classes are required");
    if (labels.size() != points.rows()) throw ShapeError("svm: label count differs from point count");

    std::vector<std::vector<std::size_t>> members(classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes) throw FitError("svm: label out of range");
        members[labels[i]].push_back(i);
    }

    std::vector<SvmBinaryModel> pairs;
    pairs.reserve(pairCount(classes));
    for (std::size_t a = 0; a < classes; ++a) {
        for (std::size_t b = a + 1; b < classes; ++b) {
            const std::string tag = "pair (" + classNames[a] + ", " + classNames[b] + "): ";
            std::vector<std::size_t> rows = members[a];
            rows.insert(rows.end(), members[b].begin(), members[b].end());
            std::sort(rows.begin(), rows.end());
            Matrix subset(rows.size(), points.cols());
            std::vector<int> signs(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const auto src = points.row(rows[r]);
                std::copy(src.begin(), src.end(), subset.row(r).begin());
                signs[r] = labels[rows[r]] == static_cast<int>(a) ? 1 : -1;
            }
            try {
                pairs.push_back(fitSvmBinary(subset, signs, kernel, options));
            } catch (const ConvergenceError& e) {
                throw ConvergenceError(tag + e.what());
            } catch (const Error& e) {
                throw FitError(tag + e.what());
            }
        }
    }
    return SvmMulticlassModel(std::move(classNames), std::move(pairs));
}

int svmPredictIndex(const SvmMulticlassModel& model, std::span<const double> x) {
    const std::size_t classes = model.classNames().size();
    const auto decisions = model.decisionValues(x);
    std::vector<int> votes(classes, 0);
    std::vector<double> wonMargin(classes, 0.0);
    std::size_t p = 0;
    for (std::size_t a = 0; a < classes; ++a) {
        for (std::size_t b = a + 1; b < classes; ++b, ++p) {
            const std::size_t winner = decisions[p] > 0.0 ? a : b;
            ++votes[winner];
            wonMargin[winner] += std::abs(decisions[p]);
        }
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
        if (votes[c] != votes[best]) {
            if (votes[c] > votes[best]) best = c;
        } else if (wonMargin[c] != wonMargin[best]) {
            if (wonMargin[c] > wonMargin[best]) best = c;
        } else if (model.classNames()[c] < model.classNames()[best]) {
            best = c;
        }
    }
    return static_cast<int>(best);
}

std::string svmPredict(const SvmMulticlassModel& model, std::span<const double> x) {
    return model.classNames()[svmPredictIndex(model, x)];
}

// ---------------------------------------------------------------------------

std::string majorityVoteImage(std::span<const std::string> instancePredictions) {
    if (instancePredictions.empty()) throw ArgumentError("majority vote over an empty prediction list");
    std::map<std::string, std::size_t> counts;
    for (const auto& p : instancePredictions) ++counts[p];
    // std::map iterates in name order, so the first maximum wins ties.
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void checkHeader(const json& doc, const char* kind) {
    if (!doc.is_object() || doc.value("kind", "") != kind) {
        throw ParseError(std::string("model document is not of kind '") + kind + "'");
    }
    if (doc.value("version", 0) != kModelVersion) throw ParseError("unsupported model version");
}

template <typename Fn>
auto parsingModel(const char* kind, Fn&& fn) {
    try {
        return fn();
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed ") + kind + " model: " + e.what());
    } catch (const ShapeError& e) {
        throw ParseError(std::string("malformed ") + kind + " model: " + e.what());
    } catch (const ArgumentError& e) {
        throw ParseError(std::string("malformed ") + kind + " model: " + e.what());
    }
}

}  // namespace

json toJson(const Kernel& kernel) {
    if (kernel.kind == KernelKind::Linear) return json{{"type", "linear"}};
    return json{{"type", "rbf"}, {"gamma", kernel.gamma}};
}

Kernel kernelFromJson(const json& doc) {
    const auto type = doc.at("type").get<std::string>();
    if (type == "linear") return Kernel::linear();
    if (type == "rbf") return Kernel::rbf(doc.at("gamma").get<double>());
    throw ParseError("unknown kernel type '" + type + "'");
}

json toJson(const KnnModel& model) {
    return json{{"kind", "knn"},
                {"version", kModelVersion},
                {"k", model.k},
                {"d", model.points.cols()},
                {"n", model.points.rows()},
                {"class_names", model.classNames},
                {"points", matrixToJson(model.points)},
                {"labels", model.labels}};
}

KnnModel knnFromJson(const json& doc) {
    checkHeader(doc, "knn");
    return parsingModel("knn", [&] {
        const auto d = doc.at("d").get<std::size_t>();
        const auto n = doc.at("n").get<std::size_t>();
        return fitKnn(matrixFromJson(doc.at("points"), n, d), doc.at("labels").get<std::vector<int>>(),
                      doc.at("class_names").get<std::vector<std::string>>(), doc.at("k").get<int>());
    });
}

json toJson(const SvmMulticlassModel& model) {
    json pairs = json::array();
    const std::size_t classes = model.classNames_.size();
    std::size_t p = 0;
    for (std::size_t a = 0; a < classes; ++a) {
        for (std::size_t b = a + 1; b < classes; ++b, ++p) {
            const auto& pm = model.pairModels_[p];
            pairs.push_back(json{{"positive", a},
                                 {"negative", b},
                                 {"bias", pm.bias},
                                 {"sv_indices", model.poolIndex_[p]},
                                 {"dual_coefs", pm.dualCoefs}});
        }
    }
    std::vector<double> flatPool;
    flatPool.reserve(model.pool_.size() * model.inputDim_);
    for (const auto& sv : model.pool_) flatPool.insert(flatPool.end(), sv.begin(), sv.end());
    const auto& first = model.pairModels_.front();
    return json{{"kind", "svm"},
                {"version", kModelVersion},
                {"scheme", "one-vs-one"},
                {"kernel", toJson(first.kernel)},
                {"c", first.c},
                {"d", model.inputDim_},
                {"class_names", model.classNames_},
                {"support_vector_count", model.pool_.size()},
                {"support_vectors", flatPool},
                {"pairs", pairs}};
}

SvmMulticlassModel svmFromJson(const json& doc) {
    checkHeader(doc, "svm");
    return parsingModel("svm", [&] {
        const Kernel kernel = kernelFromJson(doc.at("kernel"));
        const double c = doc.at("c").get<double>();
        const auto d = doc.at("d").get<std::size_t>();
        const auto count = doc.at("support_vector_count").get<std::size_t>();
        const Matrix pool = matrixFromJson(doc.at("support_vectors"), count, d);
        auto classNames = doc.at("class_names").get<std::vector<std::string>>();

        std::vector<SvmBinaryModel> pairs;
        for (const auto& entry : doc.at("pairs")) {
            SvmBinaryModel pm;
            pm.kernel = kernel;
            pm.c = c;
            pm.bias = entry.at("bias").get<double>();
            pm.dualCoefs = entry.at("dual_coefs").get<std::vector<double>>();
            const auto indices = entry.at("sv_indices").get<std::vector<std::size_t>>();
            if (indices.size() != pm.dualCoefs.size()) throw ParseError("svm model: index/coefficient count mismatch");
            for (std::size_t idx : indices) {
                if (idx >= count) throw ParseError("svm model: support vector index out of range");
                const auto row = pool.row(idx);
                pm.supportVectors.emplace_back(row.begin(), row.end());
            }
            pairs.push_back(std::move(pm));
        }
        return SvmMulticlassModel(std::move(classNames), std::move(pairs));
    });
}

}  // namespace honeyhsi
