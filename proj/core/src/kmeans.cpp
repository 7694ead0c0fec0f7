#include "musum/kmeans.hpp"

#include "musum/common.hpp"
#include "musum/rng.hpp"

#include <cassert>
#include <limits>

namespace musum {

namespace {

// k-means++: first centroid uniform, then proportional to squared distance
// from the nearest chosen centroid. If every remaining point coincides with a
// centroid, picks the lowest unused index.
Eigen::MatrixXd seed_centroids(const Eigen::MatrixXd& points, int k, Rng& rng) {
  const int n = static_cast<int>(points.rows());
  Eigen::MatrixXd centroids(k, points.cols());
  std::vector<char> used(static_cast<size_t>(n), 0);

  int first = rng.uniform_int(n);
  centroids.row(0) = points.row(first);
  used[static_cast<size_t>(first)] = 1;

  std::vector<double> dist2(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    dist2[static_cast<size_t>(i)] = (points.row(i) - centroids.row(0)).squaredNorm();

  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : dist2) total += d;
    int pick = -1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cum = 0.0;
      for (int i = 0; i < n; ++i) {
        cum += dist2[static_cast<size_t>(i)];
        if (cum >= target) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1; // guard against rounding in the scan
    } else {
      for (int i = 0; i < n; ++i)
        if (!used[static_cast<size_t>(i)]) {
          pick = i;
          break;
        }
      if (pick < 0) pick = rng.uniform_int(n);
    }
    centroids.row(c) = points.row(pick);
    used[static_cast<size_t>(pick)] = 1;
    for (int i = 0; i < n; ++i) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < dist2[static_cast<size_t>(i)]) dist2[static_cast<size_t>(i)] = d;
    }
  }
  return centroids;
}

} // namespace

int nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::VectorXd& point) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c).transpose() - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int max_iters,
                    double shift_tol) {
  const int n = static_cast<int>(points.rows());
  if (k < 1) fail(ErrorKind::Config, "kmeans: k must be positive");
  if (n < k) fail(ErrorKind::Config, strformat("kmeans: %d points for k=%d", n, k));

  Rng rng(seed);
  KMeansResult result;
  result.centroids = seed_centroids(points, k, rng);
  result.assignments.assign(static_cast<size_t>(n), 0);

  std::vector<double> point_dist2(static_cast<size_t>(n), 0.0);
  const auto assign = [&]() {
    double objective = 0.0;
    for (int i = 0; i < n; ++i) {
      const int c = nearest_centroid(result.centroids, points.row(i).transpose());
      result.assignments[static_cast<size_t>(i)] = c;
      point_dist2[static_cast<size_t>(i)] = (points.row(i) - result.centroids.row(c)).squaredNorm();
      objective += point_dist2[static_cast<size_t>(i)];
    }
    return objective;
  };

  result.objective_history.push_back(assign());

  for (int iter = 1; iter <= max_iters; ++iter) {
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<int> counts(static_cast<size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      sums.row(result.assignments[static_cast<size_t>(i)]) += points.row(i);
      ++counts[static_cast<size_t>(result.assignments[static_cast<size_t>(i)])];
    }

    Eigen::MatrixXd next(k, points.cols());
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) {
        next.row(c) = sums.row(c) / counts[static_cast<size_t>(c)];
      } else {
        int farthest = 0;
        for (int i = 1; i < n; ++i)
          if (point_dist2[static_cast<size_t>(i)] > point_dist2[static_cast<size_t>(farthest)])
            farthest = i;
        next.row(c) = points.row(farthest);
        point_dist2[static_cast<size_t>(farthest)] = 0.0; // claim it for this cluster
        result.assignments[static_cast<size_t>(farthest)] = c;
      }
    }

    double shift = 0.0;
    for (int c = 0; c < k; ++c)
      shift = std::max(shift, (next.row(c) - result.centroids.row(c)).norm());
    result.centroids = next;
    result.iterations = iter;

    const double objective = assign();
    assert(objective <= result.objective_history.back() + 1e-9);
    result.objective_history.push_back(objective);
    if (shift < shift_tol) break;
  }

  result.distortion = result.objective_history.back();
  return result;
}

} // namespace musum
