#include "musum/rank.hpp"

#include "musum/common.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace musum {

namespace {

constexpr double kStationaryTol = 1e-12;
constexpr int kStationaryMaxIters = 100000;
constexpr double kLexRankTol = 1e-10;
constexpr int kLexRankMaxIters = 100000;

// Scores this close (scaled by magnitude) count as tied, so the documented
// lower-index tie-breaking is stable under summation-order rounding noise.
constexpr double kTieTol = 1e-10;

bool tie_greater(double candidate, double incumbent) {
  return candidate > incumbent + kTieTol * std::max(1.0, std::abs(incumbent));
}

int argmax_low_tie(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (tie_greater(v(i), v(best))) best = i;
  return best;
}

} // namespace

std::vector<int> grasshopper_rank(const Eigen::MatrixXd& similarity,
                                  const GrasshopperParams& params, int k,
                                  GrasshopperTrace* trace) {
  const int n = static_cast<int>(similarity.rows());
  if (n < 1 || similarity.cols() != n)
    fail(ErrorKind::Config, "grasshopper: similarity matrix must be square and non-empty");
  if (k < 1 || k > n) fail(ErrorKind::Config, "grasshopper: rank count out of range");
  if (!(params.lambda >= 0.0 && params.lambda <= 1.0))
    fail(ErrorKind::Config, "grasshopper: lambda must lie in [0,1]");

  Eigen::VectorXd prior;
  if (params.prior.empty()) {
    prior = Eigen::VectorXd::Constant(n, 1.0 / n);
  } else {
    if (static_cast<int>(params.prior.size()) != n)
      fail(ErrorKind::Config, "grasshopper: prior size does not match sentence count");
    prior.resize(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      if (params.prior[static_cast<size_t>(i)] < 0.0)
        fail(ErrorKind::Config, "grasshopper: prior entries must be nonnegative");
      prior(i) = params.prior[static_cast<size_t>(i)];
      sum += prior(i);
    }
    if (std::abs(sum - 1.0) > 1e-9)
      fail(ErrorKind::Config, "grasshopper: prior must sum to 1");
  }

  // P = lambda * row-normalized W + (1-lambda) * 1 r^T; zero rows get the
  // uniform distribution before mixing.
  Eigen::MatrixXd P(n, n);
  for (int i = 0; i < n; ++i) {
    const double row_sum = similarity.row(i).sum();
    for (int j = 0; j < n; ++j) {
      const double o = row_sum > 0.0 ? similarity(i, j) / row_sum : 1.0 / n;
      P(i, j) = params.lambda * o + (1.0 - params.lambda) * prior(j);
    }
  }

  Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (int iter = 0; iter < kStationaryMaxIters; ++iter) {
    Eigen::VectorXd next = P.transpose() * pi;
    const double delta = (next - pi).lpNorm<1>();
    pi = next;
    if (delta < kStationaryTol) break;
  }
  if (trace != nullptr) {
    trace->stationary = pi;
    trace->visit_vectors.clear();
  }

  std::vector<int> ranking;
  ranking.reserve(static_cast<size_t>(k));
  std::vector<char> ranked(static_cast<size_t>(n), 0);
  const int first = argmax_low_tie(pi);
  ranking.push_back(first);
  ranked[static_cast<size_t>(first)] = 1;

  while (static_cast<int>(ranking.size()) < k) {
    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
      if (!ranked[static_cast<size_t>(i)]) rest.push_back(i);
    const int m = static_cast<int>(rest.size());

    Eigen::MatrixXd Q(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) Q(a, b) = P(rest[static_cast<size_t>(a)], rest[static_cast<size_t>(b)]);

    // v = N^T 1 / m with N = (I-Q)^-1, obtained from one solve on (I-Q)^T.
    Eigen::MatrixXd system = (Eigen::MatrixXd::Identity(m, m) - Q).transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (!lu.isInvertible())
      fail(ErrorKind::Config,
           "grasshopper: absorbing system is singular (graph disconnected with lambda = 1)");
    const Eigen::VectorXd visits = lu.solve(Eigen::VectorXd::Ones(m)) / m;
    if (trace != nullptr) trace->visit_vectors.push_back(visits);

    const int next = rest[static_cast<size_t>(argmax_low_tie(visits))];
    ranking.push_back(next);
    ranked[static_cast<size_t>(next)] = 1;
  }
  return ranking;
}

std::vector<double> lexrank(const Eigen::MatrixXd& similarity, const LexRankParams& params) {
  const int n = static_cast<int>(similarity.rows());
  if (n < 1 || similarity.cols() != n)
    fail(ErrorKind::Config, "lexrank: similarity matrix must be square and non-empty");
  if (!(params.damping > 0.0 && params.damping < 1.0))
    fail(ErrorKind::Config, "lexrank: damping must lie in (0,1)");

  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && similarity(i, j) >= params.threshold) adj[static_cast<size_t>(i)].push_back(j);

  std::vector<double> degree(static_cast<size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    if (params.weighted) {
      for (int z : adj[static_cast<size_t>(j)]) degree[static_cast<size_t>(j)] += similarity(j, z);
    } else {
      degree[static_cast<size_t>(j)] = static_cast<double>(adj[static_cast<size_t>(j)].size());
    }
  }

  const double base = (1.0 - params.damping) / n;
  std::vector<double> score(static_cast<size_t>(n), 1.0 / n);
  std::vector<double> next(static_cast<size_t>(n));
  for (int iter = 0; iter < kLexRankMaxIters; ++iter) {
    double max_change = 0.0;
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j : adj[static_cast<size_t>(i)]) {
        if (degree[static_cast<size_t>(j)] <= 0.0) continue;
        const double w = params.weighted ? similarity(i, j) : 1.0;
        acc += w / degree[static_cast<size_t>(j)] * score[static_cast<size_t>(j)];
      }
      next[static_cast<size_t>(i)] = base + params.damping * acc;
      max_change = std::max(max_change, std::abs(next[static_cast<size_t>(i)] - score[static_cast<size_t>(i)]));
    }
    score.swap(next);
    if (max_change < kLexRankTol) break;
  }
  return score;
}

std::vector<double> lsa_rank(const SentenceVectors& vectors) {
  const int n = vectors.count();
  if (n < 1) fail(ErrorKind::Config, "lsa: no sentences");

  // Terms are rows, sentences columns.
  const Eigen::MatrixXd a = vectors.matrix.transpose();
  if (a.norm() == 0.0) return std::vector<double>(static_cast<size_t>(n), 0.0);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV(); // n x rank, column i = topic i

  int topics = 0;
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma(i) >= sigma(0) / 2.0) topics = i + 1;

  std::vector<double> score(static_cast<size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int i = 0; i < topics; ++i) acc += v(j, i) * v(j, i) * sigma(i) * sigma(i);
    score[static_cast<size_t>(j)] = std::sqrt(acc);
  }
  return score;
}

std::vector<int> mmr_select(const SentenceVectors& vectors, double lambda, int k) {
  const int n = vectors.count();
  if (n < 1) fail(ErrorKind::Config, "mmr: no sentences");
  if (k < 1 || k > n) fail(ErrorKind::Config, "mmr: rank count out of range");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorKind::Config, "mmr: lambda must lie in [0,1]");

  const Eigen::VectorXd query = vectors.matrix.colwise().mean().transpose();
  std::vector<double> relevance(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    relevance[static_cast<size_t>(i)] = cosine_similarity(vectors.matrix.row(i).transpose(), query);

  std::vector<int> picked;
  picked.reserve(static_cast<size_t>(k));
  std::vector<char> taken(static_cast<size_t>(n), 0);
  std::vector<double> max_sim_to_picked(static_cast<size_t>(n), 0.0);
  while (static_cast<int>(picked.size()) < k) {
    int best = -1;
    double best_value = 0.0;
    for (int i = 0; i < n; ++i) {
      if (taken[static_cast<size_t>(i)]) continue;
      const double value = lambda * relevance[static_cast<size_t>(i)] -
                           (1.0 - lambda) * max_sim_to_picked[static_cast<size_t>(i)];
      if (best < 0 || tie_greater(value, best_value)) {
        best = i;
        best_value = value;
      }
    }
    picked.push_back(best);
    taken[static_cast<size_t>(best)] = 1;
    for (int i = 0; i < n; ++i) {
      if (taken[static_cast<size_t>(i)]) continue;
      const double s = cosine_similarity(vectors.matrix.row(i).transpose(),
                                         vectors.matrix.row(best).transpose());
      max_sim_to_picked[static_cast<size_t>(i)] = std::max(max_sim_to_picked[static_cast<size_t>(i)], s);
    }
  }
  return picked;
}

std::vector<double> support_sets_rank(const SentenceVectors& vectors) {
  const int n = vectors.count();
  if (n < 1) fail(ErrorKind::Config, "support sets: no sentences");
  if (n == 1) return {1.0};

  const Eigen::MatrixXd sim = sentence_similarity_matrix(vectors);

  // Two clusters grown in passage order; each sentence joins the cluster
  // whose running centroid it is more similar to (ties keep cluster 1).
  std::vector<int> cluster_of(static_cast<size_t>(n));
  cluster_of[0] = 0;
  cluster_of[1] = 1;
  Eigen::VectorXd centroid[2] = {vectors.matrix.row(0).transpose(), vectors.matrix.row(1).transpose()};
  int member_count[2] = {1, 1};
  for (int i = 2; i < n; ++i) {
    const Eigen::VectorXd row = vectors.matrix.row(i).transpose();
    const double s0 = cosine_similarity(row, centroid[0]);
    const double s1 = cosine_similarity(row, centroid[1]);
    const int c = s1 > s0 ? 1 : 0;
    cluster_of[static_cast<size_t>(i)] = c;
    centroid[c] = (centroid[c] * member_count[c] + row) / (member_count[c] + 1);
    ++member_count[c];
  }

  std::vector<double> score(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    int nearest = -1;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (nearest < 0 || sim(i, j) > sim(i, nearest)) nearest = j;
    }
    const int support_cluster = cluster_of[static_cast<size_t>(nearest)];
    for (int s = 0; s < n; ++s)
      if (s != i && cluster_of[static_cast<size_t>(s)] == support_cluster)
        score[static_cast<size_t>(s)] += 1.0;
  }
  return score;
}

std::vector<int> rank_by_score_desc(const std::vector<double>& scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[static_cast<size_t>(a)] > scores[static_cast<size_t>(b)];
  });
  return order;
}

} // namespace musum
