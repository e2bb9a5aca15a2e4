#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "amshd/mutual_information.hpp"

using namespace amshd;

namespace {

// brute-force plug-in MI over the joint histogram (both variables discrete)
double plugin_mi(const Eigen::VectorXd& x, const Eigen::VectorXi& y) {
  const auto n = static_cast<double>(x.size());
  std::map<std::pair<double, int>, double> joint;
  std::map<double, double> px;
  std::map<int, double> py;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    joint[{x(i), y(i)}] += 1.0 / n;
    px[x(i)] += 1.0 / n;
    py[y(i)] += 1.0 / n;
  }
  double mi = 0;
  for (const auto& [xy, p] : joint) {
    mi += p * std::log(p / (px[xy.first] * py[xy.second]));
  }
  return mi;
}

}  // namespace

TEST_SUITE("data_pipeline") {

TEST_CASE("digamma at integer arguments") {
  constexpr double kGamma = 0.57721566490153286;
  CHECK(digamma_integer(1) == doctest::Approx(-kGamma));
  CHECK(digamma_integer(2) == doctest::Approx(1.0 - kGamma));
  CHECK(digamma_integer(5) == doctest::Approx(25.0 / 12.0 - kGamma));
  CHECK_THROWS_AS(digamma_integer(0), std::invalid_argument);
}

TEST_CASE("mi: knn estimate matches the plug-in oracle on a discrete alphabet") {
  std::mt19937_64 rng(7);
  const Eigen::Index m = 5000;
  Eigen::VectorXd x(m);
  Eigen::VectorXi y(m);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
  for (Eigen::Index i = 0; i < m; ++i) {
    y(i) = unit() < 0.5 ? 0 : 1;
    if (y(i) == 1) {
      x(i) = unit() < 0.7 ? 2.0 : 3.0;
    } else {
      const double u = unit();
      x(i) = u < 0.5 ? 0.0 : (u < 0.8 ? 1.0 : 2.0);
    }
  }
  const double oracle = plugin_mi(x, y);
  const double est = mutual_information_column(x, y, 3, 99);
  CHECK(std::abs(est - oracle) < 0.05);
}

TEST_CASE("mi: perfectly informative feature approaches ln 2") {
  std::mt19937_64 rng(8);
  const Eigen::Index m = 2000;
  Eigen::VectorXd x(m);
  Eigen::VectorXi y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    y(i) = (rng() & 1) ? 1 : 0;
    x(i) = y(i);
  }
  const double est = mutual_information_column(x, y, 3, 5);
  CHECK(std::abs(est - std::log(2.0)) < 0.05);
}

TEST_CASE("mi: independence and label shuffling stay near zero") {
  std::mt19937_64 rng(9);
  const Eigen::Index m = 2000;
  Eigen::VectorXd x(m);
  Eigen::VectorXi y(m);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1p-53; };
  for (Eigen::Index i = 0; i < m; ++i) {
    x(i) = unit();
    y(i) = (rng() & 1) ? 1 : 0;
  }
  CHECK(mutual_information_column(x, y, 3, 1) < 0.05);

  // informative feature, shuffled labels
  Eigen::VectorXd xs(m);
  for (Eigen::Index i = 0; i < m; ++i) xs(i) = y(i);
  Eigen::VectorXi ys = y;
  for (Eigen::Index i = m - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(ys(i), ys(j));
  }
  CHECK(mutual_information_column(xs, ys, 3, 2) < 0.05);
}

TEST_CASE("mi: nonnegative, deterministic, constant feature scores zero") {
  std::mt19937_64 rng(10);
  const Eigen::Index m = 300;
  Eigen::MatrixXd f(m, 3);
  Eigen::VectorXi y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    y(i) = static_cast<int>(rng() % 2);
    f(i, 0) = static_cast<double>(rng() >> 11) * 0x1p-53;
    f(i, 1) = 7.0;  // constant
    f(i, 2) = y(i) + 0.001 * (static_cast<double>(rng() >> 11) * 0x1p-53);
  }
  const auto s1 = mutual_information(f, y, 3, 42);
  const auto s2 = mutual_information(f, y, 3, 42);
  CHECK(s1.scores == s2.scores);
  CHECK(s1.scores.minCoeff() >= 0.0);
  CHECK(s1.scores(1) == 0.0);
  CHECK(s1.scores(2) > 0.5);
  CHECK(s1.k == 3);
}

TEST_CASE("mi: preconditions") {
  Eigen::VectorXd x(4);
  x << 1, 2, 3, 4;
  Eigen::VectorXi y(4);
  y << 0, 0, 1, 1;
  CHECK_THROWS_AS(mutual_information_column(x, y, 3, 1), std::invalid_argument);  // m <= k+1

  Eigen::VectorXd x6(6);
  x6 << 1, 2, 3, 4, 5, 6;
  Eigen::VectorXi y6(6);
  y6 << 0, 0, 0, 0, 0, 1;  // class 1 smaller than k+1
  CHECK_THROWS_AS(mutual_information_column(x6, y6, 3, 1), std::invalid_argument);
}

TEST_CASE("select_features: default and top-k policies") {
  MiScores s;
  s.scores.resize(9);
  s.scores << 0.371, 0.181, 0.156, 0.103, 0.034, 0.031, 0, 0, 0;
  CHECK(select_features(s) == std::vector<int>{0, 1, 2, 3, 4, 5});

  SelectionPolicy top1{SelectionPolicy::Kind::TopK, 1};
  CHECK(select_features(s, top1) == std::vector<int>{0});

  SelectionPolicy top3{SelectionPolicy::Kind::TopK, 3};
  CHECK(select_features(s, top3) == std::vector<int>{0, 1, 2});

  MiScores zero;
  zero.scores = Eigen::VectorXd::Zero(4);
  CHECK_THROWS_AS(select_features(zero), std::invalid_argument);
}

}  // TEST_SUITE
