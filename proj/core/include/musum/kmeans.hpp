#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace musum {

struct KMeansResult {
  Eigen::MatrixXd centroids; // k x dim
  std::vector<int> assignments;
  double distortion = 0.0; // sum of squared distances to assigned centroids
  std::vector<double> objective_history; // objective after each assignment pass
  int iterations = 0; // centroid update steps performed
};

/// Lloyd's algorithm with k-means++ seeding. Deterministic for a fixed seed.
/// Stops when no centroid moves more than shift_tol or after max_iters update
/// steps. An empty cluster is reseeded to the point farthest from its
/// assigned centroid.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iters = 300,
                    double shift_tol = 1e-6);

/// Index of the nearest centroid (squared Euclidean); ties pick the lowest
/// index.
int nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::VectorXd& point);

} // namespace musum
