#include "musum/classify.hpp"

#include "musum/common.hpp"
#include "musum/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace musum {

namespace {

constexpr int kMaxSmoSteps = 200000;

double rbf(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double gamma) {
  return std::exp(-gamma * (a - b).squaredNorm());
}

struct BinarySolution {
  std::vector<double> alpha;
  double bias = 0.0;
};

// Two-variable SMO with maximal-violating-pair working-set selection.
// Solves min 1/2 a^T Q a - e^T a, 0 <= a <= C, sum a_i y_i = 0.
BinarySolution solve_binary(const Eigen::MatrixXd& kernel, const std::vector<double>& y, double c,
                            double tol) {
  const int n = static_cast<int>(y.size());
  BinarySolution sol;
  sol.alpha.assign(static_cast<size_t>(n), 0.0);
  std::vector<double> u(static_cast<size_t>(n), 0.0); // u_i = sum_j a_j y_j K_ij

  for (int step = 0; step < kMaxSmoSteps; ++step) {
    // m = max over I_up of y - u, M = min over I_low; optimal when m - M <= tol.
    int i = -1, j = -1;
    double m = -std::numeric_limits<double>::infinity();
    double M = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      const double v = y[static_cast<size_t>(t)] - u[static_cast<size_t>(t)];
      const bool in_up = (y[static_cast<size_t>(t)] > 0 && sol.alpha[static_cast<size_t>(t)] < c) ||
                         (y[static_cast<size_t>(t)] < 0 && sol.alpha[static_cast<size_t>(t)] > 0);
      const bool in_low = (y[static_cast<size_t>(t)] < 0 && sol.alpha[static_cast<size_t>(t)] < c) ||
                          (y[static_cast<size_t>(t)] > 0 && sol.alpha[static_cast<size_t>(t)] > 0);
      if (in_up && v > m) {
        m = v;
        i = t;
      }
      if (in_low && v < M) {
        M = v;
        j = t;
      }
    }
    if (i < 0 || j < 0 || m - M <= tol) break;

    // Step t along d = y_i e_i - y_j e_j keeps the equality constraint.
    double eta = kernel(i, i) + kernel(j, j) - 2.0 * kernel(i, j);
    if (eta < 1e-12) eta = 1e-12;
    double t_step = (m - M) / eta;

    const double yi = y[static_cast<size_t>(i)], yj = y[static_cast<size_t>(j)];
    double t_max = std::numeric_limits<double>::infinity();
    t_max = std::min(t_max, yi > 0 ? c - sol.alpha[static_cast<size_t>(i)] : sol.alpha[static_cast<size_t>(i)]);
    t_max = std::min(t_max, yj > 0 ? sol.alpha[static_cast<size_t>(j)] : c - sol.alpha[static_cast<size_t>(j)]);
    t_step = std::min(t_step, t_max);
    if (t_step <= 0.0) break;

    sol.alpha[static_cast<size_t>(i)] =
        std::clamp(sol.alpha[static_cast<size_t>(i)] + yi * t_step, 0.0, c);
    sol.alpha[static_cast<size_t>(j)] =
        std::clamp(sol.alpha[static_cast<size_t>(j)] - yj * t_step, 0.0, c);
    for (int a = 0; a < n; ++a)
      u[static_cast<size_t>(a)] += t_step * (kernel(a, i) - kernel(a, j));
  }

  // y - u estimates the bias at every point; prefer free support vectors.
  double acc = 0.0;
  int free_count = 0;
  for (int t = 0; t < n; ++t) {
    if (sol.alpha[static_cast<size_t>(t)] > 1e-12 && sol.alpha[static_cast<size_t>(t)] < c - 1e-12) {
      acc += y[static_cast<size_t>(t)] - u[static_cast<size_t>(t)];
      ++free_count;
    }
  }
  if (free_count > 0) {
    sol.bias = acc / free_count;
  } else {
    double m = -std::numeric_limits<double>::infinity();
    double M = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      const double v = y[static_cast<size_t>(t)] - u[static_cast<size_t>(t)];
      const bool in_up = (y[static_cast<size_t>(t)] > 0 && sol.alpha[static_cast<size_t>(t)] < c) ||
                         (y[static_cast<size_t>(t)] < 0 && sol.alpha[static_cast<size_t>(t)] > 0);
      const bool in_low = (y[static_cast<size_t>(t)] < 0 && sol.alpha[static_cast<size_t>(t)] < c) ||
                          (y[static_cast<size_t>(t)] > 0 && sol.alpha[static_cast<size_t>(t)] > 0);
      if (in_up) m = std::max(m, v);
      if (in_low) M = std::min(M, v);
    }
    sol.bias = (m + M) / 2.0;
    if (!std::isfinite(sol.bias)) sol.bias = 0.0;
  }
  return sol;
}

} // namespace

SvmModel train_classifier(const LabeledDataset& train, const SvmParams& params) {
  const int n = train.size();
  const int dim = train.dim();
  if (n < 1) fail(ErrorKind::Config, "train_classifier: empty dataset");
  if (static_cast<int>(train.labels.size()) != n)
    fail(ErrorKind::Config, "train_classifier: label count mismatch");

  std::vector<int> class_sizes(train.classes.size(), 0);
  for (int label : train.labels) {
    if (label < 0 || label >= train.class_count())
      fail(ErrorKind::Config, "train_classifier: label out of range");
    ++class_sizes[static_cast<size_t>(label)];
  }
  int present = 0;
  for (int s : class_sizes)
    if (s > 0) ++present;
  if (present < 2) fail(ErrorKind::Config, "train_classifier: need at least two classes");

  SvmModel model;
  model.classes_ = train.classes;
  model.gamma_ = params.gamma > 0.0 ? params.gamma : 1.0 / dim;

  model.mean_ = train.features.colwise().mean();
  model.scale_.resize(dim);
  for (int d = 0; d < dim; ++d) {
    const double var = (train.features.col(d).array() - model.mean_(d)).square().sum() / n;
    const double sd = std::sqrt(var);
    model.scale_(d) = sd > 0.0 ? sd : 1.0;
  }
  model.support_vectors_ = (train.features.rowwise() - model.mean_.transpose()).array().rowwise() /
                           model.scale_.transpose().array();

  for (int a = 0; a < train.class_count(); ++a) {
    if (class_sizes[static_cast<size_t>(a)] == 0) continue;
    for (int b = a + 1; b < train.class_count(); ++b) {
      if (class_sizes[static_cast<size_t>(b)] == 0) continue;
      std::vector<int> rows;
      std::vector<double> y;
      for (int i = 0; i < n; ++i) {
        if (train.labels[static_cast<size_t>(i)] == a) {
          rows.push_back(i);
          y.push_back(1.0);
        } else if (train.labels[static_cast<size_t>(i)] == b) {
          rows.push_back(i);
          y.push_back(-1.0);
        }
      }
      const int m = static_cast<int>(rows.size());
      Eigen::MatrixXd kernel(m, m);
      for (int p = 0; p < m; ++p)
        for (int q = p; q < m; ++q) {
          const double k = rbf(model.support_vectors_.row(rows[static_cast<size_t>(p)]).transpose(),
                               model.support_vectors_.row(rows[static_cast<size_t>(q)]).transpose(),
                               model.gamma_);
          kernel(p, q) = k;
          kernel(q, p) = k;
        }
      const BinarySolution sol = solve_binary(kernel, y, params.c, params.tol);

      SvmModel::PairModel pair;
      pair.class_a = a;
      pair.class_b = b;
      pair.bias = sol.bias;
      for (int p = 0; p < m; ++p) {
        if (sol.alpha[static_cast<size_t>(p)] > 1e-12) {
          pair.sv_rows.push_back(rows[static_cast<size_t>(p)]);
          pair.coeffs.push_back(sol.alpha[static_cast<size_t>(p)] * y[static_cast<size_t>(p)]);
        }
      }
      model.pairs_.push_back(std::move(pair));
    }
  }
  return model;
}

int SvmModel::predict(const Eigen::VectorXd& x) const {
  if (x.size() != mean_.size()) fail(ErrorKind::Config, "predict: dimension mismatch");
  const Eigen::VectorXd z = (x - mean_).array() / scale_.array();

  std::vector<int> votes(classes_.size(), 0);
  for (const auto& pair : pairs_) {
    double f = pair.bias;
    for (size_t s = 0; s < pair.sv_rows.size(); ++s)
      f += pair.coeffs[s] * rbf(support_vectors_.row(pair.sv_rows[s]).transpose(), z, gamma_);
    ++votes[static_cast<size_t>(f >= 0.0 ? pair.class_a : pair.class_b)];
  }
  int best = 0;
  for (size_t c = 1; c < votes.size(); ++c)
    if (votes[c] > votes[static_cast<size_t>(best)]) best = static_cast<int>(c);
  return best;
}

ConfusionMatrix cross_validate(const LabeledDataset& data, int folds, std::uint64_t seed,
                               const SvmParams& params) {
  if (folds < 2) fail(ErrorKind::Config, "cross_validate: need at least two folds");
  const int n = data.size();

  // Per-class shuffle, then deal round-robin: stratified and seed-stable.
  std::vector<int> fold_of(static_cast<size_t>(n), -1);
  for (int c = 0; c < data.class_count(); ++c) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (data.labels[static_cast<size_t>(i)] == c) members.push_back(i);
    if (static_cast<int>(members.size()) < folds)
      fail(ErrorKind::Config,
           strformat("cross_validate: class %s has %zu items for %d folds",
                     data.classes[static_cast<size_t>(c)].c_str(), members.size(), folds));
    Rng rng(derive_seed(seed, 0x666f6c64 /* "fold" */, static_cast<std::uint64_t>(c)));
    for (size_t i = members.size(); i > 1; --i)
      std::swap(members[i - 1], members[static_cast<size_t>(rng.uniform_int(static_cast<int>(i)))]);
    for (size_t i = 0; i < members.size(); ++i)
      fold_of[static_cast<size_t>(members[i])] = static_cast<int>(i) % folds;
  }

  ConfusionMatrix cm;
  cm.classes = data.classes;
  cm.counts = Eigen::MatrixXi::Zero(data.class_count(), data.class_count());

  for (int f = 0; f < folds; ++f) {
    std::vector<int> train_rows, test_rows;
    for (int i = 0; i < n; ++i)
      (fold_of[static_cast<size_t>(i)] == f ? test_rows : train_rows).push_back(i);

    LabeledDataset train;
    train.classes = data.classes;
    train.features.resize(static_cast<Eigen::Index>(train_rows.size()), data.dim());
    for (size_t i = 0; i < train_rows.size(); ++i) {
      train.features.row(static_cast<Eigen::Index>(i)) = data.features.row(train_rows[i]);
      train.labels.push_back(data.labels[static_cast<size_t>(train_rows[i])]);
    }
    const SvmModel model = train_classifier(train, params);
    for (int row : test_rows) {
      const int predicted = model.predict(data.features.row(row).transpose());
      ++cm.counts(data.labels[static_cast<size_t>(row)], predicted);
    }
  }
  return cm;
}

AccuracySummary accuracy(const ConfusionMatrix& matrix) {
  const int total = matrix.total();
  if (matrix.counts.rows() == 0 || total == 0)
    fail(ErrorKind::Config, "accuracy: empty confusion matrix");
  AccuracySummary out;
  out.overall = static_cast<double>(matrix.trace()) / total;
  for (int c = 0; c < matrix.counts.rows(); ++c) {
    const int row_sum = matrix.counts.row(c).sum();
    if (row_sum > 0)
      out.per_class.push_back(static_cast<double>(matrix.counts(c, c)) / row_sum);
    else
      out.per_class.push_back(std::nullopt);
  }
  return out;
}

} // namespace musum
