#include "amshd/mutual_information.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

namespace amshd {

double digamma_integer(std::int64_t n) {
  if (n < 1) throw std::invalid_argument("digamma_integer: argument must be >= 1");
  constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
  double h = 0.0;
  for (std::int64_t j = 1; j < n; ++j) h += 1.0 / static_cast<double>(j);
  return -kEulerGamma + h;
}

namespace {

// digamma over 1..max_n as a table; MI evaluates psi at integers only
std::vector<double> digamma_table(std::int64_t max_n) {
  constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
  std::vector<double> psi(static_cast<std::size_t>(max_n) + 1, 0.0);
  double h = 0.0;
  for (std::int64_t n = 1; n <= max_n; ++n) {
    psi[static_cast<std::size_t>(n)] = -kEulerGamma + h;
    h += 1.0 / static_cast<double>(n);
  }
  return psi;
}

bool has_duplicates(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) != v.end();
}

// distance to the k-th nearest neighbor of value x within the sorted values
// vs (x itself is a member; its zero self-distance is not counted)
double kth_neighbor_distance(const std::vector<double>& vs, std::size_t pos, int k) {
  double d = 0;
  std::size_t left = pos;   // next candidate on the left is left-1
  std::size_t right = pos;  // next candidate on the right is right+1
  for (int taken = 0; taken < k; ++taken) {
    const double dl = left > 0 ? vs[pos] - vs[left - 1] : std::numeric_limits<double>::infinity();
    const double dr = right + 1 < vs.size() ? vs[right + 1] - vs[pos]
                                            : std::numeric_limits<double>::infinity();
    if (dl <= dr) {
      d = dl;
      --left;
    } else {
      d = dr;
      ++right;
    }
  }
  return d;
}

}  // namespace

double mutual_information_column(const Eigen::VectorXd& feature, const Eigen::VectorXi& labels,
                                 int k, std::uint64_t jitter_seed) {
  const auto n = feature.size();
  if (n != labels.size()) throw std::invalid_argument("mutual_information: size mismatch");
  if (k < 1) throw std::invalid_argument("mutual_information: k must be >= 1");
  if (n <= k + 1) throw std::invalid_argument("mutual_information: need more than k+1 samples");

  std::vector<double> x(feature.data(), feature.data() + n);

  // constant feature: carries no information
  if (*std::max_element(x.begin(), x.end()) == *std::min_element(x.begin(), x.end())) {
    return 0.0;
  }

  if (has_duplicates(x)) {
    double scale = 0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0) scale = 1;
    // explicit uniform draws in (-1,1); std::normal_distribution is
    // implementation-defined and would break cross-toolchain determinism
    std::mt19937_64 rng(jitter_seed);
    for (auto& v : x) {
      const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
      v += 1e-10 * scale * (2.0 * u - 1.0);
    }
  }

  std::map<int, std::vector<std::size_t>> by_class;
  for (Eigen::Index i = 0; i < n; ++i) by_class[labels(i)].push_back(static_cast<std::size_t>(i));
  for (const auto& [c, members] : by_class) {
    if (static_cast<int>(members.size()) <= k) {
      throw std::invalid_argument("mutual_information: class " + std::to_string(c) +
                                  " has " + std::to_string(members.size()) +
                                  " samples; needs more than k = " + std::to_string(k));
    }
  }

  std::vector<double> radius(static_cast<std::size_t>(n), 0.0);
  std::vector<std::int64_t> class_size(static_cast<std::size_t>(n), 0);
  for (const auto& [c, members] : by_class) {
    std::vector<std::pair<double, std::size_t>> vals;
    vals.reserve(members.size());
    for (auto i : members) vals.emplace_back(x[i], i);
    std::sort(vals.begin(), vals.end());
    std::vector<double> sorted_vals(vals.size());
    for (std::size_t p = 0; p < vals.size(); ++p) sorted_vals[p] = vals[p].first;
    for (std::size_t p = 0; p < vals.size(); ++p) {
      const std::size_t i = vals[p].second;
      radius[i] = kth_neighbor_distance(sorted_vals, p, k);
      class_size[i] = static_cast<std::int64_t>(members.size());
    }
  }

  std::vector<double> all_sorted = x;
  std::sort(all_sorted.begin(), all_sorted.end());

  const auto psi = digamma_table(n);
  double mean_psi_class = 0, mean_psi_m = 0;
  for (Eigen::Index ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    // samples of any class strictly within the k-th neighbor distance
    // (the sample itself included)
    const auto lo = std::upper_bound(all_sorted.begin(), all_sorted.end(), x[i] - radius[i]);
    const auto hi = std::lower_bound(all_sorted.begin(), all_sorted.end(), x[i] + radius[i]);
    const auto m_i = static_cast<std::int64_t>(hi - lo);
    mean_psi_class += psi[static_cast<std::size_t>(class_size[i])];
    mean_psi_m += psi[static_cast<std::size_t>(std::max<std::int64_t>(m_i, 1))];
  }
  mean_psi_class /= static_cast<double>(n);
  mean_psi_m /= static_cast<double>(n);

  const double mi = psi[static_cast<std::size_t>(n)] + digamma_integer(k) -
                    mean_psi_class - mean_psi_m;
  return std::max(0.0, mi);
}

MiScores mutual_information(const Eigen::MatrixXd& features, const Eigen::VectorXi& labels,
                            int k, std::uint64_t jitter_seed) {
  MiScores out;
  out.k = k;
  out.scores.resize(features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    out.scores(j) = mutual_information_column(features.col(j), labels, k,
                                              jitter_seed ^ (0x9E3779B97F4A7C15ULL *
                                                             static_cast<std::uint64_t>(j + 1)));
  }
  return out;
}

std::vector<int> select_features(const MiScores& scores, const SelectionPolicy& policy) {
  std::vector<int> kept;
  const auto n = scores.scores.size();
  if (policy.kind == SelectionPolicy::Kind::PositiveScores) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (scores.scores(j) > 0) kept.push_back(static_cast<int>(j));
    }
  } else {
    if (policy.top_k < 1) throw std::invalid_argument("select_features: top_k must be >= 1");
    std::vector<int> order(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) order[static_cast<std::size_t>(j)] = static_cast<int>(j);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return scores.scores(a) > scores.scores(b);
    });
    const auto take = std::min<std::size_t>(static_cast<std::size_t>(policy.top_k), order.size());
    kept.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
    std::sort(kept.begin(), kept.end());
  }
  if (kept.empty()) {
    throw std::invalid_argument("select_features: selection is empty (all scores zero?)");
  }
  return kept;
}

}  // namespace amshd
