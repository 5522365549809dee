// Apache License, Version 2.0, refer to LICENSE.txt
#include "emodist/pmi.hpp"

#include <cmath>

#include "emodist/errors.hpp"

namespace emodist {

PmiTable PmiTable::from_counts(std::vector<std::string> emojis,
                               std::vector<std::string> classes,
                               const Eigen::MatrixXd& joint, double alpha) {
  if (alpha < 0) throw ConfigError("pmi alpha must be >= 0");
  const auto ne = static_cast<Eigen::Index>(emojis.size());
  const auto nc = static_cast<Eigen::Index>(classes.size());
  if (joint.rows() != ne || joint.cols() != nc)
    throw DataError("pmi joint table shape does not match names");
  if ((joint.array() < 0).any())
    throw DataError("pmi joint table has negative counts");

  PmiTable t;
  t.emojis = std::move(emojis);
  t.classes = std::move(classes);
  t.joint = joint;
  t.alpha = alpha;
  t.emoji_marginal = joint.rowwise().sum();
  t.class_marginal = joint.colwise().sum().transpose();
  t.total = joint.sum();
  if (!(t.total > 0)) throw DataError("pmi table is empty (N = 0)");

  const double e_count = static_cast<double>(ne);
  const double c_count = static_cast<double>(nc);
  t.values.resize(ne, nc);
  for (Eigen::Index e = 0; e < ne; ++e) {
    for (Eigen::Index c = 0; c < nc; ++c) {
      const double num =
          (t.joint(e, c) + alpha) * (t.total + alpha * e_count * c_count);
      const double den = (t.emoji_marginal(e) + alpha * c_count) *
                         (t.class_marginal(c) + alpha * e_count);
      t.values(e, c) = std::log2(num / den);
    }
  }
  return t;
}

bool PmiTable::greater(int e, int c1, int c2) const {
  const double e_count = static_cast<double>(emojis.size());
  const double lhs =
      (joint(e, c1) + alpha) * (class_marginal(c2) + alpha * e_count);
  const double rhs =
      (joint(e, c2) + alpha) * (class_marginal(c1) + alpha * e_count);
  return lhs > rhs;
}

int PmiTable::argmax_class(int e) const {
  int best = 0;
  for (int c = 1; c < static_cast<int>(classes.size()); ++c)
    if (greater(e, c, best)) best = c;
  return best;
}

std::string PmiTable::formula_string() {
  return "pmi(e,c) = log2(((n(e,c)+a)*(N+a*|E|*|C|)) / "
         "((n(e)+a*|C|)*(n(c)+a*|E|)))";
}

}  // namespace emodist
