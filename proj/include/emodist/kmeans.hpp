// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "emodist/embeddings.hpp"

namespace emodist {

struct KMeansResult {
  Eigen::MatrixXd centroids;               // k × dim
  std::map<std::string, int> assignment;   // point name → cluster index
  double inertia = 0.0;                    // Σ squared distance to centroid
  std::vector<double> inertia_history;     // post-assignment, non-increasing
  std::uint64_t seed = 0;
  int iterations = 0;

  int k() const { return static_cast<int>(centroids.rows()); }
};

// Lloyd's algorithm with k-means++ seeding. Distance ties go to the lowest
// centroid index; a cluster left empty keeps its previous centroid. Stops
// when the assignment is stable or after max_iters. Deterministic given
// (points, k, seed). Throws DataError when |points| < k.
KMeansResult kmeans(const std::map<std::string, Eigen::VectorXd>& points,
                    int k, std::uint64_t seed, int max_iters = 100);

// Top-N vocabulary tokens nearest each centroid by cosine similarity, to
// support manual naming of clusters.
std::vector<std::vector<std::string>> cluster_summary(
    const KMeansResult& result, const EmbeddingTable& table, int top_n = 10);

}  // namespace emodist
