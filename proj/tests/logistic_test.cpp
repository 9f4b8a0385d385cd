#include <gtest/gtest.h>

#include <cmath>

#include "nade/logistic.hpp"
#include "nade/random.hpp"

namespace nade {
namespace {

TEST(LogisticRegression, ConvergesOnOverlappingClasses) {
  Rng rng(1);
  const int n = 200;
  Eigen::MatrixXd X(n, 2);
  std::vector<int> y;
  for (int i = 0; i < n; ++i) {
    const int c = i % 3;
    X(i, 0) = rng.uniform(-1, 1) + (c == 1 ? 1.0 : 0.0);
    X(i, 1) = rng.uniform(-1, 1) + (c == 2 ? 1.0 : 0.0);
    y.push_back(c);
  }
  LogisticOptions opts;
  opts.l2 = 0.1;
  auto model = LogisticRegression::fit(X, y, 3, opts);
  EXPECT_LT(model.final_gradient_norm(), 1e-6);
  EXPECT_LT(model.iterations(), 5000);

  // stationarity: mean (p - y) x + l2 w = 0 checked independently
  Eigen::MatrixXd z = model.scores(X);
  Eigen::MatrixXd resid = Eigen::MatrixXd::Zero(n, 3);
  for (int i = 0; i < n; ++i) {
    Eigen::RowVectorXd e = (z.row(i).array() - z.row(i).maxCoeff()).exp().matrix();
    resid.row(i) = e / e.sum();
    resid(i, y[static_cast<std::size_t>(i)]) -= 1.0;
  }
  Eigen::MatrixXd grad = X.transpose() * resid / n + 0.1 * model.weights();
  EXPECT_LT(grad.norm(), 1e-5);
}

TEST(LogisticRegression, StrongPenaltyShrinksWeights) {
  Eigen::MatrixXd X(4, 1);
  X << -2, -1, 1, 2;
  std::vector<int> y = {0, 0, 1, 1};
  LogisticOptions weak, strong;
  weak.l2 = 0.01;
  strong.l2 = 10.0;
  EXPECT_GT(LogisticRegression::fit(X, y, 2, weak).weights().norm(),
            LogisticRegression::fit(X, y, 2, strong).weights().norm());
}

TEST(LogisticRegression, RejectsBadLabels) {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(2, 1);
  EXPECT_ANY_THROW(LogisticRegression::fit(X, {0, 3}, 2, {}));
  EXPECT_ANY_THROW(LogisticRegression::fit(X, {0}, 2, {}));
}

}  // namespace
}  // namespace nade
