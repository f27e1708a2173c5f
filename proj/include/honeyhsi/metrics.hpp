#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace honeyhsi {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::vector<std::string> classNames);
    /// Throws ShapeError unless counts is classNames.size() squared, row-major.
    ConfusionMatrix(std::vector<std::string> classNames, std::vector<std::int64_t> counts);

    void add(std::size_t trueClass, std::size_t predictedClass, std::int64_t count = 1);

    std::size_t size() const noexcept { return classNames_.size(); }
    const std::vector<std::string>& classNames() const noexcept { return classNames_; }
    std::int64_t count(std::size_t trueClass, std::size_t predictedClass) const;
    std::int64_t rowSum(std::size_t trueClass) const;
    std::int64_t columnSum(std::size_t predictedClass) const;
    std::int64_t total() const;
    const std::vector<std::int64_t>& counts() const noexcept { return counts_; }

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::vector<std::string> classNames_;
    std::vector<std::int64_t> counts_;
};

/// TP / (TP + FN); nullopt when the class has no true instances.
std::optional<double> classRecall(const ConfusionMatrix& cm, std::size_t classIndex);

/// One-vs-rest TN / (TN + FP); nullopt when every unit belongs to the class.
std::optional<double> classSpecificity(const ConfusionMatrix& cm, std::size_t classIndex);

/// Mean recall over classes with at least one true instance. For two classes this is
/// (sensitivity + specificity) / 2 of either class. Throws ArgumentError if all rows are empty.
double balancedAccuracy(const ConfusionMatrix& cm);

nlohmann::json toJson(const ConfusionMatrix& cm);

}  // namespace honeyhsi
