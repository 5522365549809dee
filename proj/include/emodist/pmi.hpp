// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace emodist {

// Smoothed PMI over an emoji × class co-occurrence table. Marginals and the
// total are derived from the joint counts, so Σ n(e,c) = N by construction.
// Comparisons between PMI cells of one emoji are evaluated with exact
// integer-valued cross products, never through the log, so assignment
// decisions are free of floating-point tie noise.
struct PmiTable {
  std::vector<std::string> emojis;   // row names
  std::vector<std::string> classes;  // column names
  Eigen::MatrixXd joint;             // n(e,c)
  Eigen::VectorXd emoji_marginal;    // n(e) = Σ_c n(e,c)
  Eigen::VectorXd class_marginal;    // n(c) = Σ_e n(e,c)
  double total = 0.0;                // N
  double alpha = 1.0;
  Eigen::MatrixXd values;            // pmi(e,c), base-2 log

  static PmiTable from_counts(std::vector<std::string> emojis,
                              std::vector<std::string> classes,
                              const Eigen::MatrixXd& joint, double alpha);

  double pmi(int e, int c) const { return values(e, c); }

  // pmi(e,c1) > pmi(e,c2), decided exactly: the shared positive factor
  // (N+α|E||C|)/(n(e)+α|C|) cancels, leaving
  // (n(e,c1)+α)(n(c2)+α|E|) > (n(e,c2)+α)(n(c1)+α|E|).
  bool greater(int e, int c1, int c2) const;

  // argmax over classes for emoji e; ties resolved to the lowest index.
  int argmax_class(int e) const;

  // The exact formula used, for report/spec metadata.
  static std::string formula_string();
};

}  // namespace emodist
