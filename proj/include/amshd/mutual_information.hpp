#pragma once

// k-nearest-neighbor mutual information between continuous features and a
// discrete target (Ross-style estimator with digamma terms):
//   I = psi(N) + psi(k) - mean_i psi(N_class(i)) - mean_i psi(m_i)
// where the k-th neighbor distance is taken within sample i's class and m_i
// counts all samples strictly within that distance. Scores clamp at 0.

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace amshd {

struct MiScores {
  Eigen::VectorXd scores;  // nats, nonnegative, one per feature column
  int k = 3;
};

// Per-feature estimates against the discrete labels. Features with repeated
// values get negligible deterministic jitter (amplitude 1e-10 x feature
// scale, seeded per column) so neighbor counts stay well-defined. Constant
// features score 0. Columns are independent; evaluation order never affects
// the result.
MiScores mutual_information(const Eigen::MatrixXd& features, const Eigen::VectorXi& labels,
                            int k = 3, std::uint64_t jitter_seed = 42);

// Single-column version.
double mutual_information_column(const Eigen::VectorXd& feature, const Eigen::VectorXi& labels,
                                 int k, std::uint64_t jitter_seed);

struct SelectionPolicy {
  enum class Kind : std::uint8_t { PositiveScores = 0, TopK = 1 };
  Kind kind = Kind::PositiveScores;
  int top_k = 1;
};

// Indices of kept features, ascending. Default keeps scores > 0; TopK keeps
// the k best (ties favor the lower index). Errors when nothing survives.
std::vector<int> select_features(const MiScores& scores, const SelectionPolicy& policy = {});

// digamma at positive integer arguments (psi(n) = -gamma + H_{n-1}); exact up
// to floating summation, no special-function dependency.
double digamma_integer(std::int64_t n);

}  // namespace amshd
