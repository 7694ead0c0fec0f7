#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace musum {

struct LabeledDataset {
  Eigen::MatrixXd features; // n x dim
  std::vector<int> labels;  // index into classes
  std::vector<std::string> ids;
  std::vector<std::string> classes;

  int size() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
  int class_count() const { return static_cast<int>(classes.size()); }
};

struct SvmParams {
  double c = 1.0;
  double gamma = 0.0; // 0 = 1/dim
  double tol = 1e-3;
};

/// One-vs-one soft-margin classifier with a radial-basis kernel, trained by
/// sequential minimal optimization. Features are standardized with the
/// training set's statistics; constant features pass through unscaled.
class SvmModel {
 public:
  int predict(const Eigen::VectorXd& x) const;
  const std::vector<std::string>& classes() const { return classes_; }

 private:
  friend SvmModel train_classifier(const LabeledDataset& train, const SvmParams& params);

  struct PairModel {
    int class_a = 0;
    int class_b = 0;
    std::vector<int> sv_rows; // rows of support_vectors_
    std::vector<double> coeffs; // alpha_i * y_i
    double bias = 0.0;
  };

  std::vector<std::string> classes_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
  Eigen::MatrixXd support_vectors_; // standardized
  std::vector<PairModel> pairs_;
  double gamma_ = 0.0;
};

SvmModel train_classifier(const LabeledDataset& train, const SvmParams& params = {});

struct ConfusionMatrix {
  std::vector<std::string> classes;
  Eigen::MatrixXi counts; // rows = true class, columns = predicted

  int total() const { return counts.sum(); }
  int trace() const { return counts.trace(); }
};

/// Stratified k-fold cross-validation; out-of-fold predictions are pooled
/// into a single confusion matrix. Fold assignment is seeded and per-class.
ConfusionMatrix cross_validate(const LabeledDataset& data, int folds, std::uint64_t seed,
                               const SvmParams& params = {});

struct AccuracySummary {
  double overall = 0.0;
  std::vector<std::optional<double>> per_class; // absent for empty rows
};

AccuracySummary accuracy(const ConfusionMatrix& matrix);

} // namespace musum
