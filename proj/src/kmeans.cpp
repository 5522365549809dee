// Apache License, Version 2.0, refer to LICENSE.txt
#include "emodist/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emodist/errors.hpp"
#include "emodist/rng.hpp"

namespace emodist {

namespace {

// Index of the nearest centroid; ties resolved to the lowest index.
int nearest_centroid(const Eigen::MatrixXd& centroids,
                     const Eigen::VectorXd& x) {
  int best = 0;
  double best_d = (centroids.row(0).transpose() - x).squaredNorm();
  for (int c = 1; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c).transpose() - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

Eigen::MatrixXd kmeanspp_seed(const Eigen::MatrixXd& x, int k, Rng& rng) {
  const auto n = x.rows();
  Eigen::MatrixXd centroids(k, x.cols());
  std::vector<double> d2(static_cast<std::size_t>(n),
                         std::numeric_limits<double>::infinity());
  const auto first = static_cast<Eigen::Index>(rng.below(
      static_cast<std::uint64_t>(n)));
  centroids.row(0) = x.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d =
          (x.row(i) - centroids.row(c - 1)).squaredNorm();
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], d);
      total += d2[static_cast<std::size_t>(i)];
    }
    Eigen::Index chosen;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[static_cast<std::size_t>(i)];
        if (target < acc) {
          chosen = i;
          break;
        }
      }
    } else {
      // All remaining points coincide with chosen centroids.
      chosen = static_cast<Eigen::Index>(
          rng.below(static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = x.row(chosen);
  }
  return centroids;
}

}  // namespace

KMeansResult kmeans(const std::map<std::string, Eigen::VectorXd>& points,
                    int k, std::uint64_t seed, int max_iters) {
  if (k < 1) throw ConfigError("kmeans k must be >= 1");
  if (max_iters < 1) throw ConfigError("kmeans max_iters must be >= 1");
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < k)
    throw DataError("kmeans needs at least k=" + std::to_string(k) +
                    " points, got " + std::to_string(points.size()));

  std::vector<std::string> names;
  names.reserve(points.size());
  Eigen::Index dim = -1;
  for (const auto& [name, vec] : points) {
    if (dim < 0) dim = vec.size();
    if (vec.size() != dim)
      throw DataError("kmeans points have mixed dimensions");
    names.push_back(name);
  }
  Eigen::MatrixXd x(n, dim);
  for (Eigen::Index i = 0; i < n; ++i)
    x.row(i) = points.at(names[static_cast<std::size_t>(i)]).transpose();

  Rng rng(seed);
  Eigen::MatrixXd centroids = kmeanspp_seed(x, k, rng);

  auto assign_all = [&](std::vector<int>& assign) {
    for (Eigen::Index i = 0; i < n; ++i)
      assign[static_cast<std::size_t>(i)] =
          nearest_centroid(centroids, x.row(i).transpose());
  };
  auto inertia_of = [&](const std::vector<int>& assign) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      total += (x.row(i) - centroids.row(assign[static_cast<std::size_t>(i)]))
                   .squaredNorm();
    return total;
  };

  KMeansResult result;
  result.seed = seed;
  std::vector<int> assign(static_cast<std::size_t>(n));
  assign_all(assign);
  result.inertia_history.push_back(inertia_of(assign));

  for (int iter = 0; iter < max_iters; ++iter) {
    // Means of the current assignment; empty clusters keep their centroid.
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
    std::vector<Eigen::Index> sizes(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += x.row(i);
      ++sizes[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c)
      if (sizes[static_cast<std::size_t>(c)] > 0)
        centroids.row(c) =
            sums.row(c) / static_cast<double>(sizes[static_cast<std::size_t>(c)]);

    std::vector<int> next(static_cast<std::size_t>(n));
    assign_all(next);
    result.inertia_history.push_back(inertia_of(next));
    result.iterations = iter + 1;
    const bool stable = next == assign;
    assign = std::move(next);
    if (stable) break;
  }

  result.centroids = std::move(centroids);
  result.inertia = result.inertia_history.back();
  for (Eigen::Index i = 0; i < n; ++i)
    result.assignment.emplace(names[static_cast<std::size_t>(i)],
                              assign[static_cast<std::size_t>(i)]);
  return result;
}

std::vector<std::vector<std::string>> cluster_summary(
    const KMeansResult& result, const EmbeddingTable& table, int top_n) {
  std::vector<std::vector<std::string>> summary;
  summary.reserve(static_cast<std::size_t>(result.k()));
  for (int c = 0; c < result.k(); ++c) {
    const Eigen::VectorXd centroid = result.centroids.row(c).transpose();
    const double cnorm = centroid.norm();
    std::vector<std::pair<double, std::string>> scored;
    scored.reserve(static_cast<std::size_t>(table.vocab.size()));
    for (int i = 0; i < table.vocab.size(); ++i) {
      const Eigen::VectorXd v = table.vectors.row(i).transpose();
      const double denom = cnorm * v.norm();
      const double cos = denom > 0 ? centroid.dot(v) / denom : 0.0;
      scored.emplace_back(cos, table.vocab.tokens[i]);
    }
    const auto limit = std::min<std::size_t>(scored.size(),
                                             static_cast<std::size_t>(top_n));
    std::partial_sort(scored.begin(), scored.begin() + static_cast<long>(limit),
                      scored.end(), [](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first > b.first;
                        return a.second < b.second;
                      });
    std::vector<std::string> top;
    for (std::size_t i = 0; i < limit; ++i) top.push_back(scored[i].second);
    summary.push_back(std::move(top));
  }
  return summary;
}

}  // namespace emodist
