// SPDX-License-Identifier: Apache-2.0
// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../unit/gradcheck.hpp"
#include "ness/analysis.hpp"
#include "ness/dataset.hpp"
#include "ness/losses.hpp"
#include "ness/metrics.hpp"
#include "ness/splitter.hpp"
#include "ness/trainer.hpp"

using namespace ness;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kSeeds = 10;

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Verdict()>& body) {
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  if (!v.pass) ++failures;
  std::printf("%s criterion %d: %s (%s)\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// 600-node homophilous SBM: six blocks of 100.
const Graph& sbm() {
  static const Graph g = [] {
    SbmParams p;
    p.block_sizes = {100, 100, 100, 100, 100, 100};
    p.intra_p = 0.05;
    p.inter_p = 0.002;
    p.feature_dim = 32;
    p.feature_noise = 1.0;
    p.seed = 1;
    return generate_sbm(p).graph;
  }();
  return g;
}

struct SeedRun {
  double test_auc = 0.0;
  SubgraphAnalysis analysis;  // NESS only
};

std::vector<SeedRun> run_seeds(TrainMode mode, std::size_t k, EncoderKind encoder) {
  std::vector<SeedRun> out;
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    TrainConfig c;
    c.mode = mode;
    if (mode == TrainMode::Ness) c.k = k;
    c.encoder = encoder;
    c.alpha = 0;
    c.seed = seed;
    const Split split = res_split(sbm(), {0.85, 0.05, 0.10}, seed);
    Partition partition;
    if (mode == TrainMode::Ness) partition = partition_k(split.train, sbm().num_nodes(), k, seed);
    const Partition* pp = mode == TrainMode::Ness ? &partition : nullptr;
    const TrainResult r = train(c, sbm(), split, pp);
    SeedRun s;
    s.test_auc = evaluate_embedding(r.embedding, split.test_pos, split.test_neg).auc;
    if (pp) {
      const InferenceInputs in = prepare_inference(c, sbm(), split, pp);
      s.analysis = analyze_subgraphs(r.best_params, in, partition, split.test_pos, split.test_neg, 0.5);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<double> field(const std::vector<SeedRun>& runs, const std::function<double(const SeedRun&)>& f) {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(f(r));
  return v;
}

// Cached GNAE runs shared by criteria 1-5.
const std::vector<SeedRun>& gnae(TrainMode mode, std::size_t k) {
  static std::vector<SeedRun> sgae, n2, n4, n8;
  auto& slot = mode == TrainMode::Sgae ? sgae : (k == 2 ? n2 : (k == 4 ? n4 : n8));
  if (slot.empty()) slot = run_seeds(mode, k, EncoderKind::Gnae);
  return slot;
}

double auc_of(const SeedRun& r) { return r.test_auc; }

// --- oracles ---------------------------------------------------------------

double brute_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos)
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

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

double ntxent_loops(const Matrix& ha, const Matrix& hb, double tau, bool in_view) {
  const std::size_t n = ha.rows();
  auto vec = [&](std::size_t k) { return k < n ? ha.row(k) : hb.row(k - n); };
  auto cosine = [](std::span<const double> a, std::span<const double> b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ab += a[i] * b[i];
      aa += a[i] * a[i];
      bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
  };
  double total = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const std::size_t partner = i < n ? i + n : i - n;
    double denom = 0.0;
    for (std::size_t k = 0; k < 2 * n; ++k) {
      if (k == i) continue;
      if (!in_view && (k < n) == (i < n)) continue;
      denom += std::exp(cosine(vec(i), vec(k)) / tau);
    }
    total += -std::log(std::exp(cosine(vec(i), vec(partner)) / tau) / denom);
  }
  return total / static_cast<double>(2 * n);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- criteria --------------------------------------------------------------

Verdict gap() {
  const double sgae = 100.0 * mean(field(gnae(TrainMode::Sgae, 0), auc_of));
  const double ness4 = 100.0 * mean(field(gnae(TrainMode::Ness, 4), auc_of));
  const double d = ness4 - sgae;
  return {d >= 1.0, "SBM fallback, GNAE, 10 seeds: NESS4 " + fmt("%.3f", ness4) + " SGAE " + fmt("%.3f", sgae) +
                        " gap " + fmt("%+.3f", d) + " points, need >= +1.0"};
}

Verdict trend() {
  const double n2 = 100.0 * mean(field(gnae(TrainMode::Ness, 2), auc_of));
  const double n4 = 100.0 * mean(field(gnae(TrainMode::Ness, 4), auc_of));
  bool ok = n4 >= n2 - 0.3;
  std::string detail = "NESS4 " + fmt("%.3f", n4) + " vs NESS2 " + fmt("%.3f", n2) + " - 0.3";
  for (std::size_t k : {2, 4, 8}) {
    const auto& runs = gnae(TrainMode::Ness, k);
    const double agg = mean(field(runs, [](const SeedRun& r) { return r.analysis.aggregate_auc; }));
    const double indiv = mean(field(runs, [](const SeedRun& r) { return mean(r.analysis.per_subgraph_auc); }));
    ok = ok && agg >= indiv;
    detail += "; K=" + std::to_string(k) + " aggregate " + fmt("%.4f", agg) + " vs subgraph mean " + fmt("%.4f", indiv);
  }
  return {ok, detail};
}

Verdict correlation() {
  std::vector<double> pearson, cons;
  for (std::size_t k : {2, 4, 8}) {
    const auto& runs = gnae(TrainMode::Ness, k);
    pearson.push_back(mean(field(runs, [](const SeedRun& r) { return r.analysis.pearson.mean; })));
    cons.push_back(mean(field(runs, [](const SeedRun& r) { return r.analysis.consensus_ratio; })));
  }
  int inversions = 0;
  double worst = 0.0;
  for (const auto* seq : {&pearson, &cons})
    for (std::size_t i = 1; i < seq->size(); ++i)
      if ((*seq)[i] > (*seq)[i - 1]) {
        ++inversions;
        worst = std::max(worst, (*seq)[i] - (*seq)[i - 1]);
      }
  const bool ok = inversions == 0 || (inversions == 1 && worst <= 0.02);
  return {ok, "Pearson K=2/4/8 " + fmt("%.4f", pearson[0]) + "/" + fmt("%.4f", pearson[1]) + "/" +
                  fmt("%.4f", pearson[2]) + ", consensus " + fmt("%.4f", cons[0]) + "/" + fmt("%.4f", cons[1]) + "/" +
                  fmt("%.4f", cons[2]) + ", inversions " + std::to_string(inversions)};
}

Verdict aggregation() {
  bool ok = true;
  std::string detail = "NESS2 agg - direct:";
  for (EncoderKind kind : {EncoderKind::Gcn, EncoderKind::Lin, EncoderKind::Gnae}) {
    const auto runs = kind == EncoderKind::Gnae ? gnae(TrainMode::Ness, 2) : run_seeds(TrainMode::Ness, 2, kind);
    const double d = mean(field(runs, [](const SeedRun& r) { return r.analysis.agg_vs_direct.delta; }));
    ok = ok && d > 0.0;
    detail += " " + std::string(to_string(kind)) + " " + fmt("%+.5f", d);
  }
  return {ok, detail};
}

Verdict ensemble() {
  const auto& runs = gnae(TrainMode::Ness, 8);
  const double agg = mean(field(runs, [](const SeedRun& r) { return r.analysis.aggregate_auc; }));
  const double ens = mean(field(runs, [](const SeedRun& r) { return r.analysis.ensemble.auc; }));
  return {agg >= ens, "NESS8 aggregate " + fmt("%.5f", agg) + " vs ensemble " + fmt("%.5f", ens)};
}

Verdict gradients() {
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0;
  for (EncoderKind kind : {EncoderKind::Gcn, EncoderKind::Lin, EncoderKind::Gnae})
    for (int alpha : {0, 1})
      for (bool bias : {false, true}) {
        const auto in = gradcheck::make_instance(kind, bias, 11);
        ObjectiveOptions opts;
        opts.alpha = alpha;
        const auto r = gradcheck::check(*in, opts);
        checked += r.checked;
        if (r.worst_rel >= worst) {
          worst = r.worst_rel;
          where = std::string(to_string(kind)) + " alpha=" + std::to_string(alpha) + " " + r.worst_entry;
        }
      }
  return {worst <= 1e-4, std::to_string(checked) + " entries, worst relative error " + fmt("%.3g", worst) + " at " + where};
}

Verdict metric_oracles() {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> coarse(0, 5);
  std::size_t auc_mismatch = 0;
  double ap_err = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t np = 1 + g() % 100, nn = 1 + g() % 100;
    const bool ties = t % 2 == 0;
    std::vector<double> pos(np), neg(nn);
    for (double& x : pos) x = ties ? coarse(g) / 5.0 : u(g);
    for (double& x : neg) x = ties ? coarse(g) / 5.0 : u(g);
    if (auc(pos, neg) != brute_auc(pos, neg)) ++auc_mismatch;
    ap_err = std::max(ap_err, std::abs(average_precision(pos, neg) - brute_ap(pos, neg)));
  }
  return {auc_mismatch == 0 && ap_err <= 1e-12,
          "200 sets: AUC mismatches " + std::to_string(auc_mismatch) + ", max AP error " + fmt("%.3g", ap_err)};
}

Verdict loss_oracles() {
  std::mt19937_64 g(8);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + g() % 16, d = 1 + g() % 8;
    Matrix ha(n, d), hb(n, d);
    for (double& v : ha.values()) v = nd(g);
    for (double& v : hb.values()) v = nd(g);
    for (double tau : {0.1, 0.5, 1.0})
      for (bool in_view : {true, false})
        worst = std::max(worst, std::abs(ntxent_pair(ha, hb, {tau, in_view}) - ntxent_loops(ha, hb, tau, in_view)));
  }
  const EdgeScores zero{std::vector<double>(7, 0.0), std::vector<double>(7, 0.0)};
  const double log2_err = std::abs(subgraph_recon_loss(zero) - std::log(2.0));
  return {worst <= 1e-10 && log2_err <= 1e-12,
          "NT-Xent max error " + fmt("%.3g", worst) + ", recon log 2 error " + fmt("%.3g", log2_err)};
}

Verdict invariants() {
  std::mt19937_64 g(9);
  std::size_t bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + g() % 40;
    std::bernoulli_distribution keep(0.05 + 0.9 * static_cast<double>(g() % 100) / 100.0);
    std::vector<Edge> edges;
    for (NodeId a = 0; a < n; ++a)
      for (NodeId b = a + 1; b < n; ++b)
        if (keep(g)) edges.push_back({a, b});
    if (edges.empty()) edges.push_back({0, 1});
    const EdgeSet train(edges);
    const std::size_t k = 1 + g() % std::min<std::size_t>(train.size(), 12);
    if (!partition_violation(partition_k(train, n, k, g()), train).empty() ||
        partition_k(train, n, k, 0).k() != k)
      ++bad;
  }

  std::size_t mismatched = 0;
  SbmParams p;
  p.block_sizes = {30, 30};
  p.intra_p = 0.2;
  p.inter_p = 0.02;
  p.feature_dim = 4;
  p.seed = 5;
  const Graph small = generate_sbm(p).graph;
  const Split split = res_split(small, {0.85, 0.05, 0.10}, 5);
  const Partition one = partition_k(split.train, small.num_nodes(), 1, 5);
  for (EncoderKind kind : {EncoderKind::Gcn, EncoderKind::Lin, EncoderKind::Gnae}) {
    TrainConfig c;
    c.encoder = kind;
    c.drop_p = 0.0;
    c.k = 1;
    c.max_epochs = 40;
    c.seed = 5;
    c.mode = TrainMode::Ness;
    const TrainResult a = train(c, small, split, &one);
    c.mode = TrainMode::Sgae;
    const TrainResult b = train(c, small, split);
    if (!(a.loss_history == b.loss_history)) ++mismatched;
  }

  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + g() % 32;
    std::vector<double> z11(d), z12(d), z21(d), z22(d);
    for (std::size_t i = 0; i < d; ++i) {
      z11[i] = u(g);
      z12[i] = u(g);
      z21[i] = u(g);
      z22[i] = u(g);
    }
    auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += a[i] * b[i];
      return s;
    };
    // Aggregate through the library so the identity is checked on its mean.
    Matrix a1(1, d), a2(1, d), b1(1, d), b2(1, d);
    for (std::size_t i = 0; i < d; ++i) {
      a1(0, i) = z11[i];
      a2(0, i) = z12[i];
      b1(0, i) = z21[i];
      b2(0, i) = z22[i];
    }
    const Matrix za[] = {a1, a2}, zb[] = {b1, b2};
    const Matrix z1 = aggregate(za), z2 = aggregate(zb);
    double lhs = 0.0;
    for (std::size_t i = 0; i < d; ++i) lhs += z1(0, i) * z2(0, i);
    const double rhs = (dot(z11, z21) + dot(z11, z22) + dot(z12, z21) + dot(z12, z22)) / 4.0;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return {bad == 0 && mismatched == 0 && worst <= 1e-12,
          "partition violations " + std::to_string(bad) + "/1000, K=1 vs SGAE mismatches " +
              std::to_string(mismatched) + "/3, decomposition max error " + fmt("%.3g", worst)};
}

Verdict determinism() {
  const fs::path dir = fs::path(NESS_TEST_TMP) / "acceptance";
  fs::remove_all(dir);
  const std::string exe = NESSBENCH_EXE;
  auto sh = [](const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); };
  if (sh(exe + " --seed 4 --out " + (dir / "data").string() + " synth --blocks 60 60 --intra-p 0.1") != 0 ||
      sh(exe + " --seed 4 --out " + dir.string() + " split --data " + (dir / "data").string() + " --k 4") != 0)
    return {false, "could not prepare data"};
  std::size_t compared = 0;
  for (const char* mode : {"ness", "sgae", "fgae", "ds", "dres"}) {
    const std::string k = std::string(mode) == "ness" ? "4" : "2";
    std::string csv[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / (std::string(mode) + std::to_string(rep));
      if (sh(exe + " --seed 9 --out " + out.string() + " train --data " + (dir / "data").string() + " --split " +
             (dir / "split.json").string() + " --set mode=" + mode + " --set k=" + k + " --set max_epochs=60") != 0)
        return {false, std::string("train failed for mode ") + mode};
      csv[rep] = slurp(out / "metrics.csv");
    }
    if (csv[0].empty() || csv[0] != csv[1]) return {false, std::string("metrics.csv differs for mode ") + mode};
    ++compared;
  }
  return {true, std::to_string(compared) + " modes, repeated train runs give byte-identical metrics.csv"};
}

}  // namespace

int main() {
  report(1, "NESS4 vs SGAE link-prediction gap", gap);
  report(2, "subgraph-count trend and aggregate vs individual subgraphs", trend);
  report(3, "correlation and consensus fall with K", correlation);
  report(4, "aggregation beats direct encoding", aggregation);
  report(5, "aggregate-then-score vs score ensemble", ensemble);
  report(6, "gradients match finite differences", gradients);
  report(7, "AUC and AP match brute-force oracles", metric_oracles);
  report(8, "NT-Xent and reconstruction loss oracles", loss_oracles);
  report(9, "structural invariants", invariants);
  report(10, "train command determinism", determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
