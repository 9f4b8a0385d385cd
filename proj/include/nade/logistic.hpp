#pragma once

#include <vector>

#include <Eigen/Dense>

namespace nade {

struct LogisticOptions {
  double l2 = 1.0;
  int max_iterations = 5000;
  double gradient_tolerance = 1e-6;
};

// Multinomial logistic regression (softmax) with an unpenalized intercept,
// fitted by full-batch gradient descent with backtracking line search on
// mean cross-entropy + l2/2 * ||weights||^2.
class LogisticRegression {
 public:
  // Rows of X are examples; y holds class ids in [0, classes).
  static LogisticRegression fit(const Eigen::MatrixXd& X, const std::vector<int>& y, int classes,
                                const LogisticOptions& options);

  Eigen::MatrixXd scores(const Eigen::MatrixXd& X) const;  // n x classes logits
  std::vector<int> predict(const Eigen::MatrixXd& X) const;

  int classes() const { return static_cast<int>(weights_.cols()); }
  int iterations() const { return iterations_; }
  double final_gradient_norm() const { return gradient_norm_; }
  const Eigen::MatrixXd& weights() const { return weights_; }  // features x classes
  const Eigen::RowVectorXd& intercept() const { return intercept_; }

 private:
  Eigen::MatrixXd weights_;
  Eigen::RowVectorXd intercept_;
  int iterations_ = 0;
  double gradient_norm_ = 0.0;
};

}  // namespace nade
