#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "signcop/error.hpp"
#include "signcop/metrics.hpp"

using namespace signcop;

TEST(Auc, PerfectAndReversedRankings) {
  const std::vector<int> y{1, 1, -1, -1};
  EXPECT_EQ(auc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, y), 1.0);
  EXPECT_EQ(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, y), 0.0);
}

TEST(Auc, TiesEarnHalfCredit) {
  const std::vector<int> y{1, -1};
  EXPECT_EQ(auc(std::vector<double>{0.5, 0.5}, y), 0.5);
  const std::vector<int> y3{1, 1, -1};
  EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.7, 0.4, 0.4}, y3), 0.75);
}

TEST(Auc, MatchesPairCountingOnRandomInput) {
  std::mt19937_64 gen(3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> s(60);
    std::vector<int> y(60);
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = static_cast<double>(gen() % 10) / 10.0;  // many ties
      y[i] = i < 2 ? (i == 0 ? 1 : -1) : (gen() % 2 ? 1 : -1);
    }
    double num = 0, den = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = 0; j < s.size(); ++j)
        if (y[i] == 1 && y[j] == -1) {
          den += 1;
          num += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
        }
    EXPECT_NEAR(auc(s, y), num / den, 1e-14);
  }
}

TEST(Auc, Errors) {
  EXPECT_THROW(auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), DomainError);
  EXPECT_THROW(auc(std::vector<double>{0.1}, std::vector<int>{1, -1}), Error);
  EXPECT_THROW(auc(std::vector<double>{}, std::vector<int>{}), DomainError);
}

TEST(MacroF1, Perfect) {
  const std::vector<int> y{1, -1, 1};
  EXPECT_EQ(macro_f1(y, y), 1.0);
}

TEST(MacroF1, HandWorked) {
  // Positive class: P = 1, R = ½ → ⅔. Negative class: P = ½, R = 1 → ⅔.
  EXPECT_NEAR(macro_f1(std::vector<int>{1, -1, -1}, std::vector<int>{1, 1, -1}), 2.0 / 3.0, 1e-15);
}

TEST(MacroF1, ConstantPredictor) {
  // All-positive on a 3:1 split: F1₊ = 6/7, F1₋ = 0.
  EXPECT_NEAR(macro_f1(std::vector<int>{1, 1, 1, 1}, std::vector<int>{1, 1, 1, -1}), 3.0 / 7.0,
              1e-15);
  EXPECT_EQ(macro_f1(std::vector<int>{-1, -1}, std::vector<int>{1, 1}), 0.0);
}

TEST(MacroF1, Errors) {
  EXPECT_THROW(macro_f1(std::vector<int>{1}, std::vector<int>{1, -1}), Error);
  EXPECT_THROW(macro_f1(std::vector<int>{0}, std::vector<int>{1}), DomainError);
}
