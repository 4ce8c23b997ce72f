// Copyright 2026 The geolink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// geolink command-line tool.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geolink/geolink.hpp"

namespace {

using namespace geolink;

Dataset load_dataset(const std::string& path, const std::string& label) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open check-in file '" + path + "'");
  try {
    return ingest_checkins(in, label);
  } catch (const ParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

GroundTruth load_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open ground-truth file '" + path + "'");
  try {
    return ingest_ground_truth(in);
  } catch (const ParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

void save_dataset(const std::string& path, const Dataset& ds) {
  auto out = open_out(path);
  write_checkins(out, ds);
}

void save_truth(const std::string& path, const GroundTruth& truth) {
  auto out = open_out(path);
  write_ground_truth(out, truth);
}

// Flags that override config-file values, which override the defaults.
struct ConfigFlags {
  std::string config_path;
  std::string variant;
  std::optional<std::int64_t> d;
  std::optional<std::int32_t> periods;
  std::optional<double> h_s, h_t, alpha, q, d_c, xi, varpi, s_delta;
  std::optional<std::size_t> k;
  std::optional<bool> outliers, weights, pruning;
  unsigned threads = 0;

  void attach(CLI::App& app) {
    app.add_option("-c,--config", config_path, "key=value config file (a previous report works too)");
    app.add_option("--variant", variant, "S1, S2, S3 or full; sets the three stage flags");
    app.add_option("--d", d, "grid cells per side");
    app.add_option("--M", periods, "number of time periods");
    app.add_option("--h-s", h_s, "spatial bandwidth, meters");
    app.add_option("--h-t", h_t, "temporal bandwidth, period widths");
    app.add_option("--alpha", alpha, "spatial/temporal trade-off in [0, 1]");
    app.add_option("--q", q, "Renyi entropy order");
    app.add_option("--k", k, "candidates per account");
    app.add_option("--d-c", d_c, "density-peaks cutoff distance, meters (default 1.5 cell diagonals)");
    app.add_option("--xi-threshold", xi, "center score threshold, count * meters");
    app.add_option("--varpi-threshold", varpi, "probability floor below which unclustered cells are dropped");
    app.add_option("--s-delta", s_delta, "similarity threshold");
    app.add_option("--outliers", outliers, "outlier pruning stage (true/false)");
    app.add_option("--weights", weights, "entropy weighting stage (true/false)");
    app.add_option("--pruning", pruning, "top-k candidate retrieval stage (true/false)");
    app.add_option("-j,--threads", threads, "worker threads, 0 = all cores");
  }

  LinkConfig resolve() const {
    LinkConfig cfg;
    if (!config_path.empty()) apply_config(cfg, load_key_values(config_path));
    if (!variant.empty()) cfg.stages = stages_for(parse_variant(variant));
    if (d) cfg.d = *d;
    if (periods) cfg.periods = *periods;
    if (h_s) cfg.bandwidths.spatial_m = *h_s;
    if (h_t) cfg.bandwidths.temporal = *h_t;
    if (alpha) cfg.mix.alpha = *alpha;
    if (q) cfg.q = *q;
    if (k) cfg.k = *k;
    if (d_c) cfg.cutoff_m = *d_c;
    if (xi) cfg.xi_threshold = *xi;
    if (varpi) cfg.varpi_threshold = *varpi;
    if (s_delta) cfg.s_delta = *s_delta;
    if (outliers) cfg.stages.outliers = *outliers;
    if (weights) cfg.stages.weights = *weights;
    if (pruning) cfg.stages.pruning = *pruning;
    cfg.threads = threads;
    cfg.validate();
    return cfg;
  }
};

// --- link / eval ---------------------------------------------------------------

struct LinkArgs {
  std::string left, right, truth, out;
  ConfigFlags flags;
};

int cmd_link(const LinkArgs& a) {
  const LinkConfig cfg = a.flags.resolve();
  const Dataset left = load_dataset(a.left, "left");
  const Dataset right = load_dataset(a.right, "right");
  std::optional<GroundTruth> truth;
  if (!a.truth.empty()) truth = load_truth(a.truth);
  const LinkOutput run = link_accounts(left, right, cfg);
  std::optional<LinkageResult> metrics;
  if (truth) metrics = evaluate(run.pairs, *truth);
  const ReportInputs inputs{a.left, a.right, a.truth};
  if (a.out.empty() || a.out == "-") {
    write_report(std::cout, inputs, cfg, run, metrics);
  } else {
    auto out = open_out(a.out);
    write_report(out, inputs, cfg, run, metrics);
    std::cout << "wrote " << run.pairs.size() << " pairs to " << a.out << '\n';
    if (metrics)
      std::cout << "precision " << metrics->precision << "  recall " << metrics->recall << "  F1 " << metrics->f1
                << '\n';
  }
  return 0;
}

int cmd_eval(const std::string& report_path, const std::string& truth_path) {
  std::ifstream in(report_path);
  if (!in) throw Error("cannot open report '" + report_path + "'");
  const auto pairs = read_report_pairs(in);
  const auto r = evaluate(pairs, load_truth(truth_path));
  std::cout << "M=" << r.correct << " N=" << r.truth << " K=" << r.returned << '\n'
            << "precision=" << r.precision << '\n'
            << "recall=" << r.recall << '\n'
            << "f1=" << r.f1 << '\n';
  return 0;
}

// --- data plumbing ---------------------------------------------------------------

struct GenFlags {
  std::uint64_t seed = 1;
  int centers_min = 2, centers_max = 10;
  double sigma_space = 0.01, sigma_time = 30.0;
  std::int32_t periods = 2880;

  void attach(CLI::App& app) {
    app.add_option("--seed", seed, "random seed");
    app.add_option("--centers-min", centers_min, "fewest Gaussian centers per account");
    app.add_option("--centers-max", centers_max, "most Gaussian centers per account");
    app.add_option("--sigma-space", sigma_space, "spatial sigma, degrees");
    app.add_option("--sigma-time", sigma_time, "temporal sigma, generator time units");
    app.add_option("--M", periods, "period count the time unit is fitted to (six sigma spans five periods)");
  }

  GenParams params(const TimeSpec& time) const {
    GenParams p;
    p.seed = seed;
    p.centers_min = centers_min;
    p.centers_max = centers_max;
    p.sigma_space_deg = sigma_space;
    p.sigma_time = sigma_time;
    p.fit_time_unit(time);
    p.validate();
    return p;
  }
};

Extent extent_of(std::initializer_list<const Dataset*> data, std::int32_t periods, TimeSpec* time_out) {
  auto [grid, time] = build_specs(data, 1, periods);
  if (time_out) *time_out = time;
  return Extent::of(grid, time);
}

struct SynthArgs {
  std::string left, right, truth, out_left, out_right, out_truth;
  std::size_t copies = 0;
  GenFlags gen;
};

int cmd_synth(const SynthArgs& a) {
  const Dataset left = load_dataset(a.left, "left");
  const Dataset right = load_dataset(a.right, "right");
  const GroundTruth truth = load_truth(a.truth);
  TimeSpec time;
  const Extent ext = extent_of({&left, &right}, a.gen.periods, &time);
  const auto out = generate_scaled(left, right, truth, a.copies, a.gen.params(time), ext);
  save_dataset(a.out_left, out.left);
  save_dataset(a.out_right, out.right);
  save_truth(a.out_truth, out.truth);
  std::cout << "accounts " << out.left.size() << " + " << out.right.size() << ", truth pairs " << out.truth.size()
            << '\n';
  return 0;
}

struct GenerateArgs {
  std::size_t accounts = 200, records_min = 200, records_max = 400;
  double min_lat = -60, max_lat = 70, min_lng = -180, max_lng = 180;
  double t_min = 1.5e9, days = 365;
  std::string out;
  GenFlags gen;
};

int cmd_generate(const GenerateArgs& a) {
  CorpusParams cp;
  cp.accounts = a.accounts;
  cp.records_min = a.records_min;
  cp.records_max = a.records_max;
  cp.region = {a.min_lat, a.max_lat, a.min_lng, a.max_lng, a.t_min, a.t_min + a.days * 86400.0};
  cp.periods = a.gen.periods;
  cp.gen = a.gen.params(TimeSpec{cp.region.t_min, cp.region.t_max, cp.periods});
  const Dataset ds = generate_corpus(cp);
  save_dataset(a.out, ds);
  std::cout << "accounts " << ds.size() << ", records " << ds.record_count() << '\n';
  return 0;
}

int cmd_noise(const std::string& in, const std::string& out, double fraction, const GenFlags& gen) {
  const Dataset ds = load_dataset(in, "input");
  TimeSpec time;
  const Extent ext = extent_of({&ds}, gen.periods, &time);
  save_dataset(out, inject_noise(ds, fraction, gen.params(time), ext));
  return 0;
}

int cmd_split(const std::string& in, const std::string& out_a, const std::string& out_b, const std::string& out_truth,
              std::uint64_t seed) {
  const Dataset ds = load_dataset(in, "input");
  auto [a, b] = split_dataset(ds, seed);
  save_dataset(out_a, a);
  save_dataset(out_b, b);
  if (!out_truth.empty()) save_truth(out_truth, identity_truth(ds));
  return 0;
}

// --- predict ---------------------------------------------------------------------

struct PredictArgs {
  std::string data, mode = "user", account;
  std::optional<double> lat, lng;
  std::optional<Timestamp> t;
  std::size_t top = 5;
  ConfigFlags flags;
};

int cmd_predict(const PredictArgs& a) {
  const LinkConfig cfg = a.flags.resolve();
  const Dataset ds = load_dataset(a.data, "data");
  const auto [grid, time] = build_specs({&ds}, cfg.d, cfg.periods);
  const ProfileSet set = build_profiles(ds, grid, time, cfg.dp_params(grid), cfg.threads);
  auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(std::string("this mode needs ") + what);
  };
  if (a.mode == "user") {
    need(a.lat && a.lng && a.t, "--lat, --lng and --time");
    const auto ranked = predict_user(*a.lat, *a.lng, *a.t, set);
    for (std::size_t i = 0; i < std::min(a.top, ranked.size()); ++i)
      std::cout << ranked[i].account_id << ',' << ranked[i].probability << '\n';
  } else if (a.mode == "location") {
    need(!a.account.empty() && a.t, "--account and --time");
    const auto ranked = predict_location(a.account, *a.t, set);
    const auto& profile = set.at(a.account);
    for (std::size_t i = 0; i < std::min(a.top, ranked.size()); ++i) {
      const auto& region = profile.regions[ranked[i].region];
      std::cout << "region " << region.id << " (" << region.cells.size() << " cells, first " << region.cells.front()
                << ")," << ranked[i].probability << '\n';
    }
  } else if (a.mode == "time") {
    need(!a.account.empty() && a.lat && a.lng, "--account, --lat and --lng");
    const PeriodId p = predict_time(a.account, *a.lat, *a.lng, set);
    const double start = time.t_min + p * time.period_width();
    std::cout << "period " << p << " [" << static_cast<std::int64_t>(start) << ", "
              << static_cast<std::int64_t>(start + time.period_width()) << ")\n";
  } else if (a.mode == "evaluate") {
    // Profiles from the earliest 80% of each account, queried with the rest.
    auto [train, test] = temporal_split(ds);
    const auto [g2, t2] = build_specs({&ds}, cfg.d, cfg.periods);
    const ProfileSet trained = build_profiles(train, g2, t2, cfg.dp_params(g2), cfg.threads);
    std::size_t hits = 0, total = 0;
    for (const auto& acc : test.accounts()) {
      for (const auto& r : acc.records) {
        hits += predict_user(r.lat, r.lng, r.timestamp, trained).front().account_id == acc.account_id ? 1 : 0;
        ++total;
      }
    }
    std::cout << "queries=" << total << '\n'
              << "top1_accuracy=" << (total ? double(hits) / double(total) : 0.0) << '\n'
              << "uniform_baseline=" << 1.0 / double(train.size()) << '\n';
  } else {
    throw Error("unknown predict mode '" + a.mode + "' (user, location, time or evaluate)");
  }
  return 0;
}

// --- bench / sweep ---------------------------------------------------------------

struct BenchArgs {
  std::vector<std::size_t> sizes{100, 200, 500};
  std::size_t records_min = 200, records_max = 400;
  std::uint64_t seed = 1;
  bool exhaustive = false;
  ConfigFlags flags;
};

int cmd_bench(const BenchArgs& a) {
  LinkConfig cfg = a.flags.resolve();
  if (a.exhaustive) cfg.stages.pruning = false;
  std::printf("%8s %14s %14s %10s %14s %12s %12s\n", "accounts", "preprocess_s", "calculation_s", "total_s",
              "avg_pair_ms", "candidates", "kernels");
  for (std::size_t m : a.sizes) {
    CorpusParams cp;
    cp.accounts = m;
    cp.records_min = a.records_min;
    cp.records_max = a.records_max;
    cp.gen.seed = a.seed;
    const auto [left, right] = split_dataset(generate_corpus(cp), a.seed + 1);
    const auto run = link_accounts(left, right, cfg);
    const double total = run.timings.preprocessing_s + run.timings.calculation_s;
    const double per_pair = run.candidates_scored ? 1e3 * run.timings.calculation_s / run.candidates_scored : 0.0;
    std::printf("%8zu %14.4f %14.4f %10.4f %14.6f %12zu %12llu\n", m, run.timings.preprocessing_s,
                run.timings.calculation_s, total, per_pair, run.candidates_scored,
                static_cast<unsigned long long>(run.kernel_evaluations.total()));
  }
  return 0;
}

struct SweepArgs {
  std::string left, right, truth, param;
  std::vector<double> values;
  ConfigFlags flags;
};

int cmd_sweep(const SweepArgs& a) {
  const LinkConfig base = a.flags.resolve();
  const Dataset left = load_dataset(a.left, "left");
  const Dataset right = load_dataset(a.right, "right");
  const GroundTruth truth = load_truth(a.truth);
  std::printf("%-8s %14s %10s %10s %10s %8s\n", a.param.c_str(), "value", "precision", "recall", "f1", "pairs");
  for (double v : a.values) {
    LinkConfig cfg = base;
    if (a.param == "h") cfg.bandwidths.spatial_m = v;
    else if (a.param == "h_t") cfg.bandwidths.temporal = v;
    else if (a.param == "q") cfg.q = v;
    else if (a.param == "alpha") cfg.mix.alpha = v;
    else if (a.param == "k") cfg.k = static_cast<std::size_t>(v);
    else if (a.param == "s_delta") cfg.s_delta = v;
    else throw Error("unknown sweep parameter '" + a.param + "' (h, h_t, q, alpha, k or s_delta)");
    const auto run = link_accounts(left, right, cfg);
    const auto m = evaluate(run.pairs, truth);
    std::printf("%-8s %14.6g %10.4f %10.4f %10.4f %8zu\n", a.param.c_str(), v, m.precision, m.recall, m.f1,
                run.pairs.size());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geolink: cross-platform account linkage from check-in data"};
  app.require_subcommand(1);

  LinkArgs link;
  auto* link_cmd = app.add_subcommand("link", "score account pairs of two check-in files");
  link_cmd->add_option("--left", link.left, "left platform check-ins (id,lat,lng,epoch)")->required();
  link_cmd->add_option("--right", link.right, "right platform check-ins")->required();
  link_cmd->add_option("--truth", link.truth, "ground-truth pairs (left_id,right_id) for metrics");
  link_cmd->add_option("-o,--out", link.out, "report file (default stdout)");
  link.flags.attach(*link_cmd);

  std::string eval_report, eval_truth;
  auto* eval_cmd = app.add_subcommand("eval", "precision, recall and F1 of a saved report");
  eval_cmd->add_option("--report", eval_report, "report written by link")->required();
  eval_cmd->add_option("--truth", eval_truth, "ground-truth pairs")->required();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "append Gaussian copies of linked pairs");
  synth_cmd->add_option("--left", synth.left)->required();
  synth_cmd->add_option("--right", synth.right)->required();
  synth_cmd->add_option("--truth", synth.truth)->required();
  synth_cmd->add_option("--copies", synth.copies, "synthetic pairs to add")->required();
  synth_cmd->add_option("--out-left", synth.out_left)->required();
  synth_cmd->add_option("--out-right", synth.out_right)->required();
  synth_cmd->add_option("--out-truth", synth.out_truth)->required();
  synth.gen.attach(*synth_cmd);

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "write a fresh synthetic corpus");
  gen_cmd->add_option("--accounts", gen.accounts);
  gen_cmd->add_option("--records-min", gen.records_min);
  gen_cmd->add_option("--records-max", gen.records_max);
  gen_cmd->add_option("--min-lat", gen.min_lat);
  gen_cmd->add_option("--max-lat", gen.max_lat);
  gen_cmd->add_option("--min-lng", gen.min_lng);
  gen_cmd->add_option("--max-lng", gen.max_lng);
  gen_cmd->add_option("--t-min", gen.t_min, "start of the time span, epoch seconds");
  gen_cmd->add_option("--days", gen.days, "length of the time span");
  gen_cmd->add_option("-o,--out", gen.out)->required();
  gen.gen.attach(*gen_cmd);

  std::string noise_in, noise_out;
  double noise_fraction = 0.1;
  GenFlags noise_gen;
  auto* noise_cmd = app.add_subcommand("noise", "replace a fraction of every account's records with noise");
  noise_cmd->add_option("--in", noise_in)->required();
  noise_cmd->add_option("-o,--out", noise_out)->required();
  noise_cmd->add_option("--fraction", noise_fraction, "share of records replaced")->check(CLI::Range(0.0, 1.0));
  noise_gen.attach(*noise_cmd);

  std::string split_in, split_a, split_b, split_truth;
  std::uint64_t split_seed = 1;
  auto* split_cmd = app.add_subcommand("split", "random 50/50 split of every account");
  split_cmd->add_option("--in", split_in)->required();
  split_cmd->add_option("--out-left", split_a)->required();
  split_cmd->add_option("--out-right", split_b)->required();
  split_cmd->add_option("--out-truth", split_truth, "identity ground truth for the halves");
  split_cmd->add_option("--seed", split_seed);

  PredictArgs pred;
  auto* pred_cmd = app.add_subcommand("predict", "user, location or time prediction");
  pred_cmd->add_option("--data", pred.data)->required();
  pred_cmd->add_option("--mode", pred.mode, "user, location, time or evaluate");
  pred_cmd->add_option("--account", pred.account);
  pred_cmd->add_option("--lat", pred.lat);
  pred_cmd->add_option("--lng", pred.lng);
  pred_cmd->add_option("--time", pred.t, "epoch seconds");
  pred_cmd->add_option("--top", pred.top, "rows to print");
  pred.flags.attach(*pred_cmd);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "time linkage on synthetic corpora of growing size");
  bench_cmd->add_option("--sizes", bench.sizes, "account counts")->delimiter(',');
  bench_cmd->add_option("--records-min", bench.records_min);
  bench_cmd->add_option("--records-max", bench.records_max);
  bench_cmd->add_option("--seed", bench.seed);
  bench_cmd->add_flag("--exhaustive", bench.exhaustive, "score every pair");
  bench.flags.attach(*bench_cmd);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "P/R/F1 over a grid of one parameter");
  sweep_cmd->add_option("--left", sweep.left)->required();
  sweep_cmd->add_option("--right", sweep.right)->required();
  sweep_cmd->add_option("--truth", sweep.truth)->required();
  sweep_cmd->add_option("--param", sweep.param, "h, h_t, q, alpha, k or s_delta")->required();
  sweep_cmd->add_option("--values", sweep.values)->required()->delimiter(',');
  sweep.flags.attach(*sweep_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*link_cmd) return cmd_link(link);
    if (*eval_cmd) return cmd_eval(eval_report, eval_truth);
    if (*synth_cmd) return cmd_synth(synth);
    if (*gen_cmd) return cmd_generate(gen);
    if (*noise_cmd) return cmd_noise(noise_in, noise_out, noise_fraction, noise_gen);
    if (*split_cmd) return cmd_split(split_in, split_a, split_b, split_truth, split_seed);
    if (*pred_cmd) return cmd_predict(pred);
    if (*bench_cmd) return cmd_bench(bench);
    if (*sweep_cmd) return cmd_sweep(sweep);
  } catch (const std::exception& e) {
    std::cerr << "geolink: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
