#include <gtest/gtest.h>

#include <random>

#include "honeyhsi/error.hpp"
#include "honeyhsi/metrics.hpp"

using namespace honeyhsi;

namespace {

ConfusionMatrix grid(std::vector<std::int64_t> counts) {
    std::size_t n = 0;
    while (n * n < counts.size()) ++n;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
    return ConfusionMatrix(names, std::move(counts));
}

}  // namespace

TEST(Confusion, CountsAndSums) {
    ConfusionMatrix cm({"a", "b"});
    cm.add(0, 0, 3);
    cm.add(0, 1);
    cm.add(1, 1, 2);
    EXPECT_EQ(cm.count(0, 0), 3);
    EXPECT_EQ(cm.rowSum(0), 4);
    EXPECT_EQ(cm.columnSum(1), 3);
    EXPECT_EQ(cm.total(), 6);
    EXPECT_THROW(cm.add(2, 0), ArgumentError);
    EXPECT_THROW(ConfusionMatrix({"a", "b"}, {1, 2, 3}), ShapeError);
}

TEST(Recall, Examples) {
    const auto perfect = grid({4, 0, 0, 0, 7, 0, 0, 0, 1});
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(classRecall(perfect, c), 1.0);
    EXPECT_EQ(classRecall(grid({3, 1, 0, 2}), 0), 0.75);
    EXPECT_FALSE(classRecall(grid({3, 1, 0, 0}), 1).has_value());
}

TEST(Specificity, Examples) {
    EXPECT_EQ(classSpecificity(grid({4, 0, 0, 6}), 0), 1.0);
    EXPECT_DOUBLE_EQ(*classSpecificity(grid({5, 0, 2, 3}), 0), 3.0 / 5.0);
    EXPECT_FALSE(classSpecificity(grid({5, 1, 0, 0}), 0).has_value());
}

TEST(BalancedAccuracy, Examples) {
    EXPECT_EQ(balancedAccuracy(grid({9, 0, 0, 1})), 1.0);
    EXPECT_DOUBLE_EQ(balancedAccuracy(grid({8, 2, 5, 5})), 0.65);
    // Recalls 1.0, 0.5, 0.0.
    EXPECT_DOUBLE_EQ(balancedAccuracy(grid({4, 0, 0, 1, 1, 0, 0, 3, 0})), 0.5);
    // Empty rows are left out of the average.
    EXPECT_DOUBLE_EQ(balancedAccuracy(grid({2, 2, 0, 0, 0, 0, 0, 0, 0})), 0.5);
    EXPECT_THROW(balancedAccuracy(grid({0, 0, 0, 0})), ArgumentError);
}

TEST(BalancedAccuracy, MeanRecallIdentityOnRandomGrids) {
    std::mt19937_64 rng(61);
    std::uniform_int_distribution<int> size(2, 8);
    std::uniform_int_distribution<int> cell(0, 20);
    std::bernoulli_distribution emptyRow(0.1);
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = size(rng);
        std::vector<std::int64_t> counts(n * n);
        for (std::size_t r = 0; r < n; ++r) {
            const bool empty = r > 0 && emptyRow(rng);
            for (std::size_t c = 0; c < n; ++c) counts[r * n + c] = empty ? 0 : cell(rng);
        }
        counts[0] += 1;
        const auto cm = grid(counts);
        double sum = 0.0;
        int defined = 0;
        for (std::size_t r = 0; r < n; ++r) {
            std::int64_t row = 0;
            for (std::size_t c = 0; c < n; ++c) row += counts[r * n + c];
            if (row == 0) continue;
            const double recall = static_cast<double>(counts[r * n + r]) / static_cast<double>(row);
            EXPECT_DOUBLE_EQ(*classRecall(cm, r), recall);
            sum += recall;
            ++defined;

            std::int64_t fp = 0, tn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (i == r) continue;
                fp += counts[i * n + r];
                for (std::size_t j = 0; j < n; ++j)
                    if (j != r) tn += counts[i * n + j];
            }
            if (fp + tn > 0) EXPECT_DOUBLE_EQ(*classSpecificity(cm, r), static_cast<double>(tn) / (tn + fp));
        }
        EXPECT_NEAR(balancedAccuracy(cm), sum / defined, 1e-12);
        if (n == 2 && defined == 2) {
            EXPECT_NEAR(balancedAccuracy(cm), 0.5 * (*classRecall(cm, 0) + *classSpecificity(cm, 0)), 1e-12);
        }
    }
}

TEST(Confusion, Json) {
    const auto doc = toJson(grid({1, 2, 3, 4}));
    EXPECT_EQ(doc["class_names"], (nlohmann::json{"a", "b"}));
    EXPECT_EQ(doc["counts"], (nlohmann::json{{1, 2}, {3, 4}}));
}
