#pragma once

#include "musum/dsp.hpp"
#include "musum/tokenize.hpp"

#include <Eigen/Dense>

#include <vector>

namespace musum {

struct GrasshopperParams {
  double lambda = 0.95;
  std::vector<double> prior; // empty = uniform
};

/// Intermediate quantities of one diversity-ranking run, for validation.
struct GrasshopperTrace {
  Eigen::VectorXd stationary; // distribution the first pick maximizes
  // One expected-visit vector per later pick; entry order follows the still
  // unranked indices in ascending order at that step.
  std::vector<Eigen::VectorXd> visit_vectors;
};

/// Ranks k sentences by simulated absorbing random walks: the first item is
/// the stationary-distribution argmax of P = lambda*O + (1-lambda)*1r^T (O =
/// row-normalized W, all-zero rows replaced by uniform); each picked item
/// becomes absorbing and later picks maximize expected visits
/// v = N^T 1 / (n-|G|), N = (I-Q)^-1. Ties (within a small numerical
/// tolerance) break toward the lower index.
std::vector<int> grasshopper_rank(const Eigen::MatrixXd& similarity, const GrasshopperParams& params,
                                  int k, GrasshopperTrace* trace = nullptr);

struct LexRankParams {
  double damping = 0.85;
  double threshold = 0.1;
  bool weighted = true;
};

/// Power-iterates the LexRank recurrence on the thresholded similarity graph
/// until scores settle below 1e-10. Isolated vertices score exactly
/// (1-d)/N. Returns the unnormalized fixed point.
std::vector<double> lexrank(const Eigen::MatrixXd& similarity, const LexRankParams& params);

/// Latent-topic scores from the thin SVD of the term-by-sentence matrix.
/// Topics kept while sigma_i >= sigma_1/2; score(j) = sqrt(sum v_ij^2 sigma_i^2).
std::vector<double> lsa_rank(const SentenceVectors& vectors);

/// Greedy maximal-marginal-relevance ordering against the centroid query.
std::vector<int> mmr_select(const SentenceVectors& vectors, double lambda, int k);

/// Support-set scores: two clusters grown in passage order (seeds: sentences
/// 0 and 1), each sentence's support set is the cluster of its most-similar
/// other sentence minus itself; score(s) counts the support sets holding s.
std::vector<double> support_sets_rank(const SentenceVectors& vectors);

/// Indices sorted by descending score; equal scores keep the lower index first.
std::vector<int> rank_by_score_desc(const std::vector<double>& scores);

} // namespace musum
