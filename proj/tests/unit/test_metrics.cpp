// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ness/metrics.hpp"
#include "oracles.hpp"

using namespace ness;

namespace {

double brute_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos)
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Walk every distinct threshold from the top, recomputing precision and recall
// by counting.
double brute_ap(const std::vector<double>& pos, const std::vector<double>& neg) {
  std::set<double, std::greater<>> thresholds(pos.begin(), pos.end());
  thresholds.insert(neg.begin(), neg.end());
  double ap = 0.0, prev_recall = 0.0;
  for (double t : thresholds) {
    double tp = 0, fp = 0;
    for (double p : pos) tp += p >= t;
    for (double n : neg) fp += n >= t;
    const double recall = tp / static_cast<double>(pos.size());
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
  }
  return ap;
}

std::vector<double> random_scores(std::mt19937_64& g, std::size_t n, bool coarse) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> c(0, 5);
  std::vector<double> v(n);
  for (double& x : v) x = coarse ? c(g) / 5.0 : u(g);
  return v;
}

}  // namespace

TEST_CASE("auc examples") {
  CHECK(auc(std::vector{0.9, 0.8}, std::vector{0.1, 0.2}) == 1.0);
  CHECK(auc(std::vector{0.9, 0.4}, std::vector{0.5, 0.1}) == 0.75);
  CHECK(auc(std::vector{0.3, 0.3}, std::vector{0.3, 0.3, 0.3}) == 0.5);
  CHECK_THROWS(auc(std::vector<double>{}, std::vector{0.1}));
  CHECK_THROWS(auc(std::vector{0.1}, std::vector<double>{}));
}

TEST_CASE("average precision examples") {
  CHECK(average_precision(std::vector{0.9, 0.8}, std::vector{0.1, 0.2}) == 1.0);
  CHECK(average_precision(std::vector{0.9}, std::vector{0.95}) == 0.5);
  CHECK_THROWS(average_precision(std::vector<double>{}, std::vector{0.1}));
  // Tied group: both items enter at one threshold with precision 1/2.
  CHECK(average_precision(std::vector{0.5}, std::vector{0.5}) == 0.5);
}

TEST_CASE("auc and ap match brute-force oracles") {
  std::mt19937_64 g(1);
  for (int t = 0; t < 300; ++t) {
    const bool coarse = t % 2 == 0;
    const auto pos = random_scores(g, 1 + g() % 60, coarse);
    const auto neg = random_scores(g, 1 + g() % 60, coarse);
    CHECK(auc(pos, neg) == brute_auc(pos, neg));
    CHECK(std::abs(average_precision(pos, neg) - brute_ap(pos, neg)) <= 1e-12);
  }
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
  std::mt19937_64 g(2);
  for (int t = 0; t < 50; ++t) {
    auto pos = random_scores(g, 20, t % 2), neg = random_scores(g, 20, t % 2);
    const double a = auc(pos, neg);
    for (double& x : pos) x = 2 * x + 1;
    for (double& x : neg) x = 2 * x + 1;
    CHECK(auc(pos, neg) == a);
  }
}

TEST_CASE("metric report and embedding evaluation") {
  const MetricReport r = metric_report(std::vector{0.9, 0.4}, std::vector{0.5, 0.1});
  CHECK(r.auc == 0.75);
  CHECK(r.n_pos == 2);
  CHECK(r.n_neg == 2);
  REQUIRE(r.threshold_accuracy);
  CHECK(*r.threshold_accuracy == 0.75);
  CHECK_FALSE(metric_report(std::vector{0.9}, std::vector{0.1}, std::nullopt).threshold_accuracy);
  const Matrix z{{1, 0}, {1, 0}, {-1, 0}, {0, 1}};
  const MetricReport e = evaluate_embedding(z, EdgeSet({{0, 1}}), EdgeSet({{0, 2}, {1, 3}}));
  CHECK(e.auc == 1.0);
  CHECK(e.ap == 1.0);
  CHECK(*e.threshold_accuracy == 1.0);
}

TEST_CASE("aggregate examples") {
  const std::vector<Matrix> two{Matrix{{2}}, Matrix{{4}}};
  CHECK(aggregate(two, Aggregation::Mean) == Matrix{{3}});
  CHECK(aggregate(two, Aggregation::Sum) == Matrix{{6}});
  CHECK(aggregate(two, Aggregation::Min) == Matrix{{2}});
  CHECK(aggregate(two, Aggregation::Max) == Matrix{{4}});
  CHECK_THROWS(aggregate(std::vector<Matrix>{}, Aggregation::Mean));
  CHECK_THROWS(aggregate(std::vector<Matrix>{Matrix(2, 2), Matrix(2, 3)}, Aggregation::Mean));
  CHECK(parse_aggregation("max") == Aggregation::Max);
  CHECK_THROWS(parse_aggregation("median"));
}

TEST_CASE("aggregate idempotence, permutation invariance, row equivariance") {
  std::mt19937_64 g(3);
  for (int t = 0; t < 30; ++t) {
    const std::size_t k = 1 + g() % 8;
    std::vector<Matrix> zs;
    for (std::size_t i = 0; i < k; ++i) zs.push_back(oracle::random_matrix(6, 3, g));
    const std::vector<Matrix> same(k, zs[0]);
    for (auto m : {Aggregation::Mean, Aggregation::Min, Aggregation::Max}) CHECK(aggregate(same, m) == zs[0]);
    std::vector<Matrix> shuffled = zs;
    std::shuffle(shuffled.begin(), shuffled.end(), g);
    for (auto m : {Aggregation::Mean, Aggregation::Sum, Aggregation::Min, Aggregation::Max})
      CHECK(aggregate(shuffled, m) == aggregate(zs, m));
    std::vector<std::size_t> perm{0, 1, 2, 3, 4, 5};
    std::shuffle(perm.begin(), perm.end(), g);
    std::vector<Matrix> permuted;
    for (const Matrix& z : zs) {
      Matrix p(6, 3);
      for (std::size_t r = 0; r < 6; ++r)
        for (std::size_t c = 0; c < 3; ++c) p(r, c) = z(perm[r], c);
      permuted.push_back(p);
    }
    const Matrix agg = aggregate(zs, Aggregation::Mean), pagg = aggregate(permuted, Aggregation::Mean);
    for (std::size_t r = 0; r < 6; ++r)
      for (std::size_t c = 0; c < 3; ++c) CHECK(pagg(r, c) == agg(perm[r], c));
  }
}
