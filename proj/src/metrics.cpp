#include "honeyhsi/metrics.hpp"

#include "honeyhsi/error.hpp"

namespace honeyhsi {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classNames)
    : classNames_(std::move(classNames)), counts_(classNames_.size() * classNames_.size(), 0) {}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classNames, std::vector<std::int64_t> counts)
    : classNames_(std::move(classNames)), counts_(std::move(counts)) {
    if (counts_.size() != classNames_.size() * classNames_.size()) {
        throw ShapeError("confusion matrix counts do not form a square grid over the classes");
    }
    for (auto c : counts_) {
        if (c < 0) throw ArgumentError("confusion matrix counts must be nonnegative");
    }
}

void ConfusionMatrix::add(std::size_t trueClass, std::size_t predictedClass, std::int64_t count) {
    if (trueClass >= size() || predictedClass >= size()) throw ArgumentError("confusion matrix index out of range");
    counts_[trueClass * size() + predictedClass] += count;
}

std::int64_t ConfusionMatrix::count(std::size_t trueClass, std::size_t predictedClass) const {
    return counts_.at(trueClass * size() + predictedClass);
}

std::int64_t ConfusionMatrix::rowSum(std::size_t trueClass) const {
    std::int64_t sum = 0;
    for (std::size_t p = 0; p < size(); ++p) sum += count(trueClass, p);
    return sum;
}

std::int64_t ConfusionMatrix::columnSum(std::size_t predictedClass) const {
    std::int64_t sum = 0;
    for (std::size_t t = 0; t < size(); ++t) sum += count(t, predictedClass);
    return sum;
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t sum = 0;
    for (auto c : counts_) sum += c;
    return sum;
}

std::optional<double> classRecall(const ConfusionMatrix& cm, std::size_t classIndex) {
    const auto row = cm.rowSum(classIndex);
    if (row == 0) return std::nullopt;
    return static_cast<double>(cm.count(classIndex, classIndex)) / static_cast<double>(row);
}

std::optional<double> classSpecificity(const ConfusionMatrix& cm, std::size_t classIndex) {
    const auto total = cm.total();
    const auto tp = cm.count(classIndex, classIndex);
    const auto fn = cm.rowSum(classIndex) - tp;
    const auto fp = cm.columnSum(classIndex) - tp;
    const auto tn = total - tp - fn - fp;
    if (tn + fp == 0) return std::nullopt;
    return static_cast<double>(tn) / static_cast<double>(tn + fp);
}

double balancedAccuracy(const ConfusionMatrix& cm) {
    double sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t c = 0; c < cm.size(); ++c) {
        if (auto r = classRecall(cm, c)) {
            sum += *r;
            ++defined;
        }
    }
    if (defined == 0) throw ArgumentError("balanced accuracy of a confusion matrix with no instances");
    return sum / static_cast<double>(defined);
}

nlohmann::json toJson(const ConfusionMatrix& cm) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t t = 0; t < cm.size(); ++t) {
        std::vector<std::int64_t> row(cm.counts().begin() + static_cast<std::ptrdiff_t>(t * cm.size()),
                                      cm.counts().begin() + static_cast<std::ptrdiff_t>((t + 1) * cm.size()));
        rows.push_back(row);
    }
    return {{"class_names", cm.classNames()}, {"counts", rows}};
}

}  // namespace honeyhsi
