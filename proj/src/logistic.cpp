#include "nade/logistic.hpp"

#include <cmath>

#include "nade/error.hpp"

namespace nade {

namespace {

struct Objective {
  const Eigen::MatrixXd& X;
  const Eigen::MatrixXd& Y;  // one-hot
  double l2;

  // Loss and, when requested, gradient with respect to (W, b).
  double eval(const Eigen::MatrixXd& W, const Eigen::RowVectorXd& b, Eigen::MatrixXd* gW,
              Eigen::RowVectorXd* gb) const {
    const double n = static_cast<double>(X.rows());
    Eigen::MatrixXd z = X * W;
    z.rowwise() += b;
    double loss = 0.0;
    Eigen::MatrixXd p(z.rows(), z.cols());
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const double m = z.row(i).maxCoeff();
      Eigen::RowVectorXd e = (z.row(i).array() - m).exp().matrix();
      const double s = e.sum();
      p.row(i) = e / s;
      loss -= (Y.row(i).array() * (z.row(i).array() - m - std::log(s))).sum();
    }
    loss = loss / n + 0.5 * l2 * W.squaredNorm();
    if (gW) {
      Eigen::MatrixXd diff = (p - Y) / n;
      *gW = X.transpose() * diff + l2 * W;
      *gb = diff.colwise().sum();
    }
    return loss;
  }
};

}  // namespace

LogisticRegression LogisticRegression::fit(const Eigen::MatrixXd& X, const std::vector<int>& y, int classes,
                                           const LogisticOptions& options) {
  if (X.rows() == 0) throw Error("logistic regression: no training examples");
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw Error("logistic regression: label count mismatch");
  if (classes < 1) throw Error("logistic regression: need at least one class");
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(X.rows(), classes);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 0 || y[i] >= classes) throw Error("logistic regression: label out of range");
    Y(static_cast<Eigen::Index>(i), y[i]) = 1.0;
  }

  LogisticRegression model;
  model.weights_ = Eigen::MatrixXd::Zero(X.cols(), classes);
  model.intercept_ = Eigen::RowVectorXd::Zero(classes);
  Objective obj{X, Y, options.l2};

  Eigen::MatrixXd gW;
  Eigen::RowVectorXd gb;
  double loss = obj.eval(model.weights_, model.intercept_, &gW, &gb);
  double step = 1.0;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const double gnorm2 = gW.squaredNorm() + gb.squaredNorm();
    model.gradient_norm_ = std::sqrt(gnorm2);
    if (model.gradient_norm_ < options.gradient_tolerance) break;
    // Armijo backtracking; the accepted step seeds the next iteration, slightly enlarged.
    step *= 2.0;
    Eigen::MatrixXd W_new;
    Eigen::RowVectorXd b_new;
    double loss_new = 0.0;
    for (int tries = 0; tries < 60; ++tries) {
      W_new = model.weights_ - step * gW;
      b_new = model.intercept_ - step * gb;
      loss_new = obj.eval(W_new, b_new, nullptr, nullptr);
      if (loss_new <= loss - 0.5 * step * gnorm2) break;
      step *= 0.5;
    }
    if (!(loss_new <= loss)) break;  // no descent possible at machine precision
    model.weights_ = std::move(W_new);
    model.intercept_ = std::move(b_new);
    loss = obj.eval(model.weights_, model.intercept_, &gW, &gb);
  }
  model.iterations_ = it;
  model.gradient_norm_ = std::sqrt(gW.squaredNorm() + gb.squaredNorm());
  return model;
}

Eigen::MatrixXd LogisticRegression::scores(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd z = X * weights_;
  z.rowwise() += intercept_;
  return z;
}

std::vector<int> LogisticRegression::predict(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd z = scores(X);
  std::vector<int> out(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    Eigen::Index best = 0;
    z.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace nade
