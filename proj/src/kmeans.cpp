#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "steamreg/errors.hpp"
#include "steamreg/numeric.hpp"
#include "steamreg/rng.hpp"

namespace steamreg {
namespace {

double squared_distance(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

void nearest_center(const Matrix& points, const Matrix& centers, Eigen::Index i,
                    std::size_t& best, double& best_d) {
  best = 0;
  best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < centers.rows(); ++j) {
    const double d = squared_distance(points, i, centers, j);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(j);
    }
  }
}

// Returns false for clusters that received no points.
std::vector<bool> update_means(const Matrix& points, const std::vector<std::size_t>& assignments,
                               Matrix& centers) {
  const Eigen::Index k = centers.rows();
  Matrix sums = Matrix::Zero(k, points.cols());
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const auto c = assignments[static_cast<std::size_t>(i)];
    sums.row(static_cast<Eigen::Index>(c)) += points.row(i);
    ++counts[c];
  }
  std::vector<bool> filled(static_cast<std::size_t>(k), false);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto n = counts[static_cast<std::size_t>(j)];
    if (n > 0) {
      centers.row(j) = sums.row(j) / static_cast<double>(n);
      filled[static_cast<std::size_t>(j)] = true;
    }
  }
  return filled;
}

}  // namespace

double kmeans_assign(const Matrix& points, const Matrix& centers,
                     std::vector<std::size_t>& assignments, std::vector<double>& distances,
                     Exec exec) {
  const auto n = static_cast<std::size_t>(points.rows());
  assignments.resize(n);
  distances.resize(n);

  if (exec == Exec::serial) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest_center(points, centers, static_cast<Eigen::Index>(i), assignments[i], distances[i]);
      sse += distances[i];
    }
    return sse;
  }

  const std::size_t blocks = block_count(n);
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t end = std::min(n, (b + 1) * kBlockRows);
    double s = 0.0;
    for (std::size_t i = b * kBlockRows; i < end; ++i) {
      nearest_center(points, centers, static_cast<Eigen::Index>(i), assignments[i], distances[i]);
      s += distances[i];
    }
    partial[b] = s;
  }
  double sse = 0.0;
  for (double s : partial) sse += s;
  return sse;
}

std::size_t count_distinct_rows(const Matrix& points) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    rows.emplace_back(points.row(i).begin(), points.row(i).end());
  }
  std::sort(rows.begin(), rows.end());
  return static_cast<std::size_t>(std::unique(rows.begin(), rows.end()) - rows.begin());
}

KMeansResult kmeans(const Matrix& points, std::size_t k, RngStream& rng, std::size_t max_iters,
                    Exec exec) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k == 0) throw InvalidArgument("kmeans: k must be at least 1");
  if (k > n) {
    throw InvalidArgument("kmeans: k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(n) + " available points");
  }
  if (k > count_distinct_rows(points)) {
    throw InvalidArgument("kmeans: k = " + std::to_string(k) +
                          " exceeds the number of distinct points");
  }

  KMeansResult out;
  out.centers.resize(static_cast<Eigen::Index>(k), points.cols());

  // Farthest-point seeding.
  std::size_t pick = static_cast<std::size_t>(rng.below(n));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t s = 0; s < k; ++s) {
    out.centers.row(static_cast<Eigen::Index>(s)) = points.row(static_cast<Eigen::Index>(pick));
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points, static_cast<Eigen::Index>(i),
                                                         out.centers,
                                                         static_cast<Eigen::Index>(s)));
    }
    pick = static_cast<std::size_t>(std::max_element(nearest.begin(), nearest.end()) -
                                    nearest.begin());
  }

  std::vector<double> dist;
  out.sse_history.push_back(kmeans_assign(points, out.centers, out.assignments, dist, exec));

  std::vector<std::size_t> previous;
  while (out.iterations < max_iters) {
    const std::vector<bool> filled = update_means(points, out.assignments, out.centers);
    for (std::size_t j = 0; j < k; ++j) {
      if (filled[j]) continue;
      const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) -
                                                dist.begin());
      out.centers.row(static_cast<Eigen::Index>(j)) = points.row(static_cast<Eigen::Index>(far));
      dist[far] = 0.0;
    }
    previous = out.assignments;
    out.sse_history.push_back(kmeans_assign(points, out.centers, out.assignments, dist, exec));
    ++out.iterations;
    if (out.assignments == previous) {
      out.converged = true;
      break;
    }
  }

  if (!out.converged) {
    // Leave every center at the mean of the points assigned to it.
    update_means(points, out.assignments, out.centers);
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sse += squared_distance(points, static_cast<Eigen::Index>(i), out.centers,
                              static_cast<Eigen::Index>(out.assignments[i]));
    }
    out.sse_history.push_back(sse);
  }
  return out;
}

}  // namespace steamreg
