// SPDX-License-Identifier: Apache-2.0
#include "ness/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif
#include <unistd.h>

#include "ness/analysis.hpp"
#include "ness/checkpoint.hpp"
#include "ness/dataset.hpp"
#include "ness/error.hpp"
#include "ness/hash.hpp"
#include "ness/kernels.hpp"
#include "ness/metrics.hpp"
#include "ness/split_io.hpp"

namespace fs = std::filesystem;

namespace ness {
namespace {

using Json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

DatasetPaths paths_in(const fs::path& dir) {
  return dataset_paths_in(dir, fs::exists(dir / "labels.txt"));
}

Json report_json(const MetricReport& r) {
  Json j;
  j["auc"] = r.auc;
  j["ap"] = r.ap;
  j["n_pos"] = r.n_pos;
  j["n_neg"] = r.n_neg;
  j["threshold_accuracy"] = r.threshold_accuracy ? Json(*r.threshold_accuracy) : Json(nullptr);
  return j;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

std::string host_name() {
  char buf[256] = {};
  if (gethostname(buf, sizeof buf - 1) != 0) return "unknown";
  return buf;
}

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  fs::path out = ".";
  int threads = 0;
};

struct SynthOptions {
  std::vector<std::size_t> blocks{200, 200, 200};
  double intra_p = 0.05;
  double inter_p = 0.002;
  std::size_t feature_dim = 16;
  double noise = 1.0;
};

struct SplitOptions {
  fs::path data;
  double val = 0.05;
  double test = 0.10;
  std::size_t k = 2;
  std::string sampler = "res";
  std::string file = "split.json";
};

struct TrainOptions {
  fs::path data;
  fs::path split;
  std::optional<fs::path> config;
  std::vector<std::string> settings;
  bool wall_time = false;
};

struct EvalOptions {
  fs::path checkpoint;
  std::optional<fs::path> split;
  std::string which = "test";
  std::optional<fs::path> file;
};

struct AnalyzeOptions {
  fs::path checkpoint;
  std::optional<fs::path> split;
  std::vector<std::string> analyses;
  double threshold = 0.5;
};

struct CompareOptions {
  fs::path matrix;
  fs::path data;
  std::size_t seeds = 10;
  double val = 0.05;
  double test = 0.10;
};

Partition sample_partition(const std::string& sampler, const EdgeSet& train, std::size_t n, std::size_t k,
                           std::uint64_t seed) {
  if (sampler == "res") return partition_k(train, n, k, seed);
  if (k == 0) throw std::invalid_argument("split: k must be at least 1");
  Rng rng = make_stream(seed, "partition");
  const std::size_t budget = (train.size() + k - 1) / k;
  Partition p;
  for (std::size_t i = 0; i < k; ++i) {
    if (sampler == "re") p.subgraphs.push_back(sample_re(train, n, budget, rng, i));
    else if (sampler == "rwj") p.subgraphs.push_back(sample_rwj(train, n, budget, rng, 0.1, nullptr, i));
    else if (sampler == "rn") p.subgraphs.push_back(sample_rn(train, n, (n + k - 1) / k, rng, i));
    else throw std::invalid_argument("split: unknown sampler '" + sampler + "' (expected res, re, rwj or rn)");
  }
  return p;
}

int cmd_synth(const GlobalOptions& g, const SynthOptions& o, std::ostream& out) {
  SbmParams p;
  p.block_sizes = o.blocks;
  p.intra_p = o.intra_p;
  p.inter_p = o.inter_p;
  p.feature_dim = o.feature_dim;
  p.feature_noise = o.noise;
  p.seed = g.seed.value_or(0);
  const DatasetBundle b = generate_sbm(p);
  fs::create_directories(g.out);
  export_dataset(b.graph, dataset_paths_in(g.out, true));
  out << "wrote " << b.graph.num_nodes() << " nodes, " << b.graph.edges().size() << " edges to "
      << g.out.string() << "\n";
  return kExitOk;
}

int cmd_split(const GlobalOptions& g, const SplitOptions& o, std::ostream& out) {
  const DatasetBundle data = load_dataset(paths_in(o.data));
  const std::uint64_t seed = g.seed.value_or(0);
  const SplitRatios ratios{1.0 - o.val - o.test, o.val, o.test};
  const Split split = res_split(data.graph, ratios, seed);
  const Partition partition = sample_partition(o.sampler, split.train, data.graph.num_nodes(), o.k, seed);
  const fs::path path = g.out / o.file;
  fs::create_directories(g.out);
  save_split(split, partition, data.graph.num_nodes(), path);
  out << "train " << split.train.size() << ", val " << split.val_pos.size() << ", test " << split.test_pos.size()
      << ", k " << partition.k() << " -> " << path.string() << "\n";
  return kExitOk;
}

TrainConfig resolve_config(const GlobalOptions& g, const TrainOptions& o) {
  TrainConfig c = o.config ? load_config(*o.config) : TrainConfig{};
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
    apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
  }
  if (g.seed) c.seed = *g.seed;
  c.validate();
  return c;
}

int cmd_train(const GlobalOptions& g, const TrainOptions& o, std::ostream& out) {
  const TrainConfig config = resolve_config(g, o);
  const DatasetPaths paths = paths_in(o.data);
  const DatasetBundle data = load_dataset(paths);
  const auto [split, partition] = load_split(o.split);
  if (split.train.empty()) throw DataError("split file has no training edges");

  const bool static_partition = config.mode == TrainMode::Ness;
  if (static_partition && partition.k() != config.k)
    throw std::invalid_argument("split file holds " + std::to_string(partition.k()) +
                                " subgraphs but the config asks for k = " + std::to_string(config.k));
  const auto t0 = std::chrono::steady_clock::now();
  const TrainResult result = train(config, data.graph, split, static_partition ? &partition : nullptr);
  const double total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(g.out);
  Checkpoint ck;
  ck.params = result.best_params;
  ck.seed = config.seed;
  ck.epoch = result.best_epoch;
  ck.meta = {config, {fs::absolute(paths.features), fs::absolute(paths.edges), std::nullopt},
             dataset_sha256(paths), fs::absolute(o.split)};
  if (paths.labels) ck.meta.dataset.labels = fs::absolute(*paths.labels);
  const fs::path ck_path = g.out / "checkpoint.bin";
  const fs::path csv_path = g.out / "metrics.csv";
  save_checkpoint(ck, ck_path);
  write_text(csv_path, metrics_csv(result, o.wall_time));

  Json m;
  m["toolkit_version"] = kToolkitVersion;
  m["command"] = "train";
  m["config"] = format_config(config);
  m["dataset"] = {{"features", ck.meta.dataset.features.generic_string()},
                  {"edges", ck.meta.dataset.edges.generic_string()},
                  {"labels", paths.labels ? Json(ck.meta.dataset.labels->generic_string()) : Json(nullptr)},
                  {"sha256", ck.meta.dataset_sha256}};
  m["split"] = {{"path", ck.meta.split_path.generic_string()}, {"sha256", sha256_file(o.split)}};
  m["seeds"] = {config.seed};
  m["outputs"] = {{"checkpoint", ck_path.generic_string()}, {"metrics", csv_path.generic_string()}};
  m["best_epoch"] = result.best_epoch;
  m["epochs_run"] = result.epochs_run();
  m["wall_ms_total"] = total_ms;
  m["timestamp"] = utc_timestamp();
  m["host"] = host_name();
  write_text(g.out / "manifest.json", m.dump(2) + "\n");
  out << "best epoch " << result.best_epoch << " of " << result.epochs_run() << ", val loss "
      << fmt(result.validation_history[result.best_epoch - 1].loss) << " -> " << g.out.string() << "\n";
  return kExitOk;
}

struct LoadedModel {
  Checkpoint checkpoint;
  DatasetBundle data;
  Split split;
  Partition partition;
};

LoadedModel load_model(const fs::path& checkpoint_path, const std::optional<fs::path>& split_path) {
  LoadedModel m{load_checkpoint(checkpoint_path), {}, {}, {}};
  const auto& meta = m.checkpoint.meta;
  if (dataset_sha256(meta.dataset) != meta.dataset_sha256)
    throw DataError("dataset files changed since training (hash mismatch)");
  m.data = load_dataset(meta.dataset);
  std::tie(m.split, m.partition) = load_split(split_path.value_or(meta.split_path));
  if (m.checkpoint.params.encoder.weights.front().rows() != m.data.graph.feature_dim())
    throw DataError("checkpoint feature width does not match the dataset");
  return m;
}

int cmd_eval(const GlobalOptions&, const EvalOptions& o, std::ostream& out) {
  const LoadedModel m = load_model(o.checkpoint, o.split);
  const TrainConfig& c = m.checkpoint.meta.config;
  const bool use_partition = c.mode == TrainMode::Ness;
  const InferenceInputs inputs = prepare_inference(c, m.data.graph, m.split, use_partition ? &m.partition : nullptr);
  const Matrix z = test_time_embedding(c, m.checkpoint.params, inputs);
  MetricReport r;
  if (o.which == "test") r = evaluate_embedding(z, m.split.test_pos, m.split.test_neg);
  else if (o.which == "val") r = evaluate_embedding(z, m.split.val_pos, m.split.val_neg);
  else throw std::invalid_argument("eval: --on expects test or val");
  Json j = report_json(r);
  const std::string text = j.dump(2) + "\n";
  if (o.file) write_text(*o.file, text);
  else out << text;
  return kExitOk;
}

int cmd_analyze(const GlobalOptions& g, const AnalyzeOptions& o, std::ostream& out) {
  const LoadedModel m = load_model(o.checkpoint, o.split);
  const TrainConfig& c = m.checkpoint.meta.config;
  if (m.partition.k() == 0) throw DataError("analyze: split file has no partition");
  const InferenceInputs inputs = prepare_inference(c, m.data.graph, m.split, &m.partition);
  const SubgraphAnalysis a =
      analyze_subgraphs(m.checkpoint.params, inputs, m.partition, m.split.test_pos, m.split.test_neg, o.threshold);

  Json full = Json::parse(analysis_json(a));
  Json selected;
  selected["k"] = full["k"];
  const std::vector<std::string> all{"fig3a", "fig3b", "fig3c", "fig4a", "fig5"};
  for (const auto& name : o.analyses.empty() ? all : o.analyses) {
    if (!full.contains(name)) throw std::invalid_argument("analyze: unknown analysis '" + name + "'");
    selected[name] = full[name];
  }
  fs::create_directories(g.out);
  write_text(g.out / "analysis.json", selected.dump(2) + "\n");
  write_text(g.out / "analysis.csv", analysis_csv(a));
  out << "k " << a.per_subgraph_auc.size() << ", aggregate auc " << fmt(a.aggregate_auc) << " -> "
      << g.out.string() << "\n";
  return kExitOk;
}

struct RunRow {
  std::string name;
  std::uint64_t seed = 0;
  MetricReport report;
  std::size_t best_epoch = 0;
  std::size_t epochs = 0;
  std::string error;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

int cmd_compare(const GlobalOptions& g, const CompareOptions& o, std::ostream& out) {
  std::ifstream in(o.matrix);
  if (!in) throw DataError("cannot open " + o.matrix.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::vector<MatrixEntry> entries = parse_config_matrix(ss.str());
  if (entries.empty()) throw std::invalid_argument("compare: the matrix file lists no configs");
  if (o.seeds == 0) throw std::invalid_argument("compare: --seeds must be at least 1");
  const DatasetBundle data = load_dataset(paths_in(o.data));
  const std::uint64_t base = g.seed.value_or(0);
  const SplitRatios ratios{1.0 - o.val - o.test, o.val, o.test};

  std::vector<RunRow> rows(entries.size() * o.seeds);
  const long n_runs = static_cast<long>(rows.size());
#pragma omp parallel for schedule(dynamic)
  for (long r = 0; r < n_runs; ++r) {
    const MatrixEntry& e = entries[static_cast<std::size_t>(r) / o.seeds];
    RunRow& row = rows[static_cast<std::size_t>(r)];
    row.name = e.name;
    row.seed = base + static_cast<std::uint64_t>(r) % o.seeds;
    try {
      TrainConfig c = e.config;
      c.seed = row.seed;
      const Split split = res_split(data.graph, ratios, row.seed);
      std::optional<Partition> partition;
      if (c.mode == TrainMode::Ness) partition = partition_k(split.train, data.graph.num_nodes(), c.k, row.seed);
      const TrainResult res = train(c, data.graph, split, partition ? &*partition : nullptr);
      row.report = evaluate_embedding(res.embedding, split.test_pos, split.test_neg);
      row.best_epoch = res.best_epoch;
      row.epochs = res.epochs_run();
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
  }

  for (const auto& row : rows)
    if (!row.error.empty()) throw NumericalError("compare: run " + row.name + " seed " + std::to_string(row.seed) +
                                                 " failed: " + row.error);

  std::string runs = "config,seed,auc,ap,best_epoch,epochs\n";
  for (const auto& row : rows)
    runs += row.name + "," + std::to_string(row.seed) + "," + fmt(row.report.auc) + "," + fmt(row.report.ap) + "," +
            std::to_string(row.best_epoch) + "," + std::to_string(row.epochs) + "\n";
  std::string summary = "config,runs,auc_mean,auc_std,ap_mean,ap_std\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    std::vector<double> aucs, aps;
    for (std::size_t s = 0; s < o.seeds; ++s) {
      aucs.push_back(rows[i * o.seeds + s].report.auc);
      aps.push_back(rows[i * o.seeds + s].report.ap);
    }
    summary += entries[i].name + "," + std::to_string(o.seeds) + "," + fmt(mean_of(aucs)) + "," +
               fmt(std_of(aucs)) + "," + fmt(mean_of(aps)) + "," + fmt(std_of(aps)) + "\n";
  }
  fs::create_directories(g.out);
  write_text(g.out / "runs.csv", runs);
  write_text(g.out / "summary.csv", summary);
  out << summary;
  return kExitOk;
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("NESSBENCH_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;
}

}  // namespace

std::string metrics_csv(const TrainResult& r, bool with_wall_time) {
  std::string out = "epoch,L_t,L_r,L_c,val_loss,val_auc,wall_ms\n";
  for (std::size_t e = 0; e < r.loss_history.size(); ++e) {
    const auto& l = r.loss_history[e];
    const auto& v = r.validation_history[e];
    out += std::to_string(e + 1) + "," + fmt(l.total) + "," + fmt(l.recon) + "," + fmt(l.contrastive) + "," +
           fmt(v.loss) + "," + fmt(v.auc) + "," + (with_wall_time ? fmt(r.wall_ms[e]) : std::string("0")) + "\n";
  }
  return out;
}

std::vector<MatrixEntry> parse_config_matrix(const std::string& text) {
  std::vector<MatrixEntry> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream words(line);
    std::string name;
    if (!(words >> name) || name[0] == '#') continue;
    MatrixEntry e{name, {}};
    std::string kv;
    try {
      while (words >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + kv + "'");
        apply_setting(e.config, kv.substr(0, eq), kv.substr(eq + 1));
      }
      e.config.validate();
    } catch (const std::invalid_argument& ex) {
      throw std::invalid_argument("matrix line " + std::to_string(line_no) + ": " + ex.what());
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subgraph-ensemble graph autoencoder link prediction toolkit", "nessbench"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads (falls back to NESSBENCH_THREADS)");

  SynthOptions synth;
  auto* s_synth = app.add_subcommand("synth", "Generate a stochastic block model dataset");
  s_synth->add_option("--blocks", synth.blocks, "Block sizes");
  s_synth->add_option("--intra-p", synth.intra_p);
  s_synth->add_option("--inter-p", synth.inter_p);
  s_synth->add_option("--feature-dim", synth.feature_dim);
  s_synth->add_option("--noise", synth.noise);

  SplitOptions split;
  auto* s_split = app.add_subcommand("split", "Split edges and partition the training graph");
  s_split->add_option("--data", split.data, "Dataset directory")->required();
  s_split->add_option("--val", split.val);
  s_split->add_option("--test", split.test);
  s_split->add_option("--k", split.k);
  s_split->add_option("--sampler", split.sampler)->check(CLI::IsMember({"res", "re", "rwj", "rn"}));
  s_split->add_option("--file", split.file, "File name inside --out");

  TrainOptions tr;
  std::string config_path;
  auto* s_train = app.add_subcommand("train", "Train a model");
  s_train->add_option("--data", tr.data)->required();
  s_train->add_option("--split", tr.split)->required();
  auto* config_opt = s_train->add_option("--config", config_path, "key = value config file");
  s_train->add_option("--set", tr.settings, "Override one config key (key=value)");
  s_train->add_flag("--wall-time", tr.wall_time, "Record per-epoch wall time in metrics.csv");

  EvalOptions ev;
  std::string eval_split, eval_file;
  auto* s_eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  s_eval->add_option("--checkpoint", ev.checkpoint)->required();
  auto* eval_split_opt = s_eval->add_option("--split", eval_split);
  s_eval->add_option("--on", ev.which)->check(CLI::IsMember({"test", "val"}));
  auto* eval_file_opt = s_eval->add_option("--file", eval_file, "Write the JSON report here");

  AnalyzeOptions an;
  std::string analyze_split;
  auto* s_analyze = app.add_subcommand("analyze", "Subgraph analyses of a checkpoint");
  s_analyze->add_option("--checkpoint", an.checkpoint)->required();
  auto* analyze_split_opt = s_analyze->add_option("--split", analyze_split);
  s_analyze->add_option("--analyses", an.analyses, "Subset of fig3a fig3b fig3c fig4a fig5")->delimiter(',');
  s_analyze->add_option("--threshold", an.threshold);

  CompareOptions cmp;
  auto* s_compare = app.add_subcommand("compare", "Multi-seed comparison of several configs");
  s_compare->add_option("--matrix", cmp.matrix)->required();
  s_compare->add_option("--data", cmp.data)->required();
  s_compare->add_option("--seeds", cmp.seeds);
  s_compare->add_option("--val", cmp.val);
  s_compare->add_option("--test", cmp.test);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (*seed_opt) g.seed = seed;
  if (*config_opt) tr.config = config_path;
  if (*eval_split_opt) ev.split = eval_split;
  if (*eval_file_opt) ev.file = eval_file;
  if (*analyze_split_opt) an.split = analyze_split;

  const int threads = resolve_threads(g.threads);
  if (threads > 0) {
    set_kernel_threads(threads);
#ifdef _OPENMP
    omp_set_num_threads(threads);
#endif
  }

  try {
    if (*s_synth) return cmd_synth(g, synth, out);
    if (*s_split) return cmd_split(g, split, out);
    if (*s_train) return cmd_train(g, tr, out);
    if (*s_eval) return cmd_eval(g, ev, out);
    if (*s_analyze) return cmd_analyze(g, an, out);
    if (*s_compare) return cmd_compare(g, cmp, out);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace ness
