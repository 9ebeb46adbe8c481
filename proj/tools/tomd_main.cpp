// tomd command-line driver.
//
//   tomd decompose          fit one decomposition, write the factor set
//   tomd reconstruct-bench  compare methods on one tensor (RSE, storage)
//   tomd cluster            multi-view clustering pipeline over seeds
//   tomd sweep              grid over mu, K and rank
//   tomd metrics            score a label file against ground truth
//   tomd synth              write the synthetic multi-view dataset as CSV + manifest
//
// Exit codes: 0 ok, 2 invalid input or usage, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tomd/baselines.hpp"
#include "tomd/error.hpp"
#include "tomd/experiments.hpp"
#include "tomd/metrics.hpp"
#include "tomd/serialize.hpp"
#include "tomd/synthetic.hpp"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream os(path);
  if (!os) throw tomd::IngestError("cannot write " + path);
  os << text;
}

void emit(const json& j, const std::string& json_path, const std::string& csv_path, const std::string& csv) {
  write_text(json_path.empty() ? "-" : json_path, j.dump(2) + "\n");
  if (!csv_path.empty()) write_text(csv_path, csv);
}

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw tomd::IngestError("cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw tomd::IngestError(path + ": " + e.what());
  }
}

tomd::Shape parse_dims(const std::string& text) {
  tomd::Shape s;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      s.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw tomd::ValidationError("bad dimension list '" + text + "'");
    }
  }
  if (s.empty()) throw tomd::ValidationError("empty dimension list");
  return s;
}

// "tomd:2,2,..." or a bare rank combined with --method.
tomd::BaselineRank rank_spec(const std::string& method, const std::string& rank) {
  if (rank.find(':') != std::string::npos) return tomd::parse_baseline_rank(rank);
  return tomd::parse_baseline_rank(method + ":" + rank);
}

tomd::Tensor load_input(const std::string& path, const std::string& reshape) {
  tomd::Tensor x = tomd::load_tensor(path);
  if (!reshape.empty()) x = tomd::reshape_phi(x, parse_dims(reshape));
  return x;
}

struct AlsFlags {
  std::size_t iter_max = 500;
  double tol = 1e-12;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--iter-max", iter_max, "ALS sweep cap")->capture_default_str();
    app->add_option("--tol", tol, "ALS relative-change tolerance")->capture_default_str();
    app->add_option("--seed", seed, "core initialization seed")->capture_default_str();
  }
  tomd::AlsConfig config() const { return {iter_max, tol, seed, false}; }
};

struct ClusterFlags {
  std::string manifest, config_path, preset, rank, json_out, csv_out, checkpoint;
  std::optional<double> mu;
  std::optional<std::size_t> k, iter_max, als_iter_max, num_seeds, replicates;
  std::optional<double> tol, tau0, beta, tau_max, als_tol;
  std::vector<std::uint64_t> seeds;
  bool include_self = false, no_warm_start = false, record_time = false;
  std::string nmi = "geometric";

  void add(CLI::App* app, bool single_point) {
    app->add_option("--manifest", manifest, "dataset manifest (JSON)")->required();
    app->add_option("--config", config_path, "JSON config; its fields override flags");
    app->add_option("--preset", preset, "yale | msrcv1 | extendyaleb | orl | reuters | handwritten");
    if (single_point) {
      app->add_option("--mu", mu, "graph regularization weight");
      app->add_option("-K,--neighbors", k, "adaptive neighbor count");
      app->add_option("--rank", rank, "R1,R2,R3,R4,D1,...,D6 for the Z-update");
    }
    app->add_option("--seeds", seeds, "explicit seed list")->delimiter(',');
    app->add_option("--num-seeds", num_seeds, "use seeds 0..n-1");
    app->add_option("--iter-max", iter_max, "ADMM iteration cap");
    app->add_option("--tol", tol, "ADMM residual tolerance");
    app->add_option("--tau0", tau0);
    app->add_option("--beta", beta);
    app->add_option("--tau-max", tau_max);
    app->add_option("--als-iter-max", als_iter_max, "inner ALS sweep cap");
    app->add_option("--als-tol", als_tol, "inner ALS tolerance");
    app->add_option("--kmeans-replicates", replicates);
    app->add_option("--nmi", nmi, "geometric | arithmetic")->check(CLI::IsMember({"geometric", "arithmetic"}));
    app->add_flag("--include-self", include_self, "let a sample be its own neighbor");
    app->add_flag("--no-warm-start", no_warm_start, "re-initialize the inner ALS every iteration");
    app->add_flag("--record-time", record_time, "add wall times (makes reports non-reproducible)");
    app->add_option("--json", json_out, "JSON report path (default: stdout)");
    app->add_option("--csv", csv_out, "CSV table path");
  }

  tomd::ExperimentConfig config() const {
    tomd::ExperimentConfig c;
    if (!preset.empty()) {
      const auto p = tomd::find_preset(preset);
      if (!p) throw tomd::ValidationError("unknown preset '" + preset + "'");
      tomd::apply_preset(c, *p);
    }
    if (mu) c.admm.mu = *mu;
    if (k) c.admm.neighbors = *k;
    if (!rank.empty()) {
      c.admm.rank = tomd::parse_tomd_rank(rank);
      c.rank_set = true;
    }
    if (!seeds.empty()) c.seeds = seeds;
    if (num_seeds) {
      c.seeds.clear();
      for (std::size_t s = 0; s < *num_seeds; ++s) c.seeds.push_back(s);
    }
    if (iter_max) c.admm.iter_max = *iter_max;
    if (tol) c.admm.tol = *tol;
    if (tau0) c.admm.tau0 = *tau0;
    if (beta) c.admm.beta = *beta;
    if (tau_max) c.admm.tau_max = *tau_max;
    if (als_iter_max) c.admm.als.iter_max = *als_iter_max;
    if (als_tol) c.admm.als.tol_als = *als_tol;
    if (replicates) c.spectral.kmeans.replicates = *replicates;
    c.admm.include_self = include_self;
    c.admm.warm_start = !no_warm_start;
    c.nmi_norm = nmi == "arithmetic" ? tomd::NmiNorm::arithmetic : tomd::NmiNorm::geometric;
    c.record_time = record_time;
    if (!config_path.empty()) tomd::apply_config_json(c, read_json_file(config_path));
    return c;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"tomd: loop tensor-network fits, baselines and multi-view clustering"};
  app.require_subcommand(1);

  // decompose
  auto* dec = app.add_subcommand("decompose", "fit one decomposition and write its factors");
  std::string dec_in, dec_method = "tomd", dec_rank, dec_out, dec_reshape, dec_json;
  AlsFlags dec_als;
  dec->add_option("--input", dec_in, "tensor text file")->required();
  dec->add_option("--reshape", dec_reshape, "reshape the input first, e.g. 16,16,16,16");
  dec->add_option("--method", dec_method, "tucker | tutr | ominus | tomd")->capture_default_str();
  dec->add_option("--rank", dec_rank, "rank vector, or method:ranks")->required();
  dec->add_option("--out", dec_out, "factor-set directory");
  dec->add_option("--json", dec_json, "summary path (default: stdout)");
  dec_als.add(dec);

  // reconstruct-bench
  auto* bench = app.add_subcommand("reconstruct-bench", "compare decompositions on one tensor");
  std::string bench_in, bench_reshape, bench_json, bench_csv;
  std::vector<std::string> bench_targets;
  std::optional<double> bench_target_rse;
  bool bench_time = false;
  AlsFlags bench_als;
  bench->add_option("--input", bench_in, "tensor text file")->required();
  bench->add_option("--reshape", bench_reshape, "reshape the input first, e.g. 16,16,16,16");
  bench->add_option("--target", bench_targets, "method:ranks, repeatable (e.g. tucker:8,8,8,8)")->required();
  bench->add_option("--rse-target", bench_target_rse, "flag rows reaching this RSE");
  bench->add_flag("--record-time", bench_time, "add wall times (makes reports non-reproducible)");
  bench->add_option("--json", bench_json, "JSON report path (default: stdout)");
  bench->add_option("--csv", bench_csv, "CSV table path");
  bench_als.add(bench);

  // cluster
  auto* cl = app.add_subcommand("cluster", "multi-view clustering over seeds");
  ClusterFlags cl_flags;
  cl_flags.add(cl, true);
  cl->add_option("--checkpoint", cl_flags.checkpoint, "write each seed's final ADMM state under this directory");

  // sweep
  auto* sw = app.add_subcommand("sweep", "grid over mu, K and rank");
  ClusterFlags sw_flags;
  std::vector<double> sw_mu;
  std::vector<std::size_t> sw_k;
  std::vector<std::string> sw_ranks;
  sw_flags.add(sw, false);
  sw->add_option("--mu", sw_mu, "mu values")->delimiter(',')->required();
  sw->add_option("-K,--neighbors", sw_k, "K values")->delimiter(',')->required();
  sw->add_option("--rank", sw_ranks, "rank vector, repeatable");

  // metrics
  auto* me = app.add_subcommand("metrics", "score predicted labels against ground truth");
  std::string me_pred, me_truth, me_json, me_nmi = "geometric";
  me->add_option("--pred", me_pred, "predicted label file")->required();
  me->add_option("--truth", me_truth, "ground-truth label file")->required();
  me->add_option("--nmi", me_nmi, "geometric | arithmetic")->check(CLI::IsMember({"geometric", "arithmetic"}));
  me->add_option("--json", me_json, "output path (default: stdout)");

  // synth
  auto* sy = app.add_subcommand("synth", "write the synthetic multi-view dataset");
  tomd::SyntheticConfig sy_cfg;
  std::string sy_out;
  std::optional<std::string> sy_dims;
  sy->add_option("--out", sy_out, "output directory")->required();
  sy->add_option("--clusters", sy_cfg.clusters)->capture_default_str();
  sy->add_option("--per-cluster", sy_cfg.per_cluster)->capture_default_str();
  sy->add_option("--features", sy_cfg.features, "feature count per view")->delimiter(',')->capture_default_str();
  sy->add_option("--subspace-dim", sy_cfg.subspace_dim)->capture_default_str();
  sy->add_option("--corruption", sy_cfg.corruption, "fraction of corrupted entries")->capture_default_str();
  sy->add_option("--seed", sy_cfg.seed)->capture_default_str();
  sy->add_option("--reshape-dims", sy_dims, "N1,N2,N3 (default: near-cubic)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*dec) {
    const tomd::Tensor x = load_input(dec_in, dec_reshape);
    const auto rank = rank_spec(dec_method, dec_rank);
    const auto cfg = dec_als.config();
    const auto d = tomd::decompose(x, rank, cfg);
    const auto fset = tomd::factor_set_from(d, x.shape(), cfg.seed);
    if (!dec_out.empty()) tomd::save_factor_set(dec_out, fset);
    json j{{"schema_version", tomd::kReportSchemaVersion},
           {"kind", "decompose"},
           {"method", tomd::to_string(rank.variant)},
           {"rank", rank.ranks},
           {"shape", x.shape()},
           {"seed", cfg.seed},
           {"sweeps", d.report.sweeps},
           {"converged", d.report.converged},
           {"final_rse", x.is_zero() ? 0.0 : tomd::rse(d.reconstruction, x)},
           {"storage_cost", d.stored_scalars},
           {"trace", d.report.trace}};
    if (!dec_out.empty()) j["factors"] = dec_out;
    emit(j, dec_json, "", "");
  } else if (*bench) {
    const tomd::Tensor x = load_input(bench_in, bench_reshape);
    std::vector<tomd::BaselineRank> targets;
    for (const auto& t : bench_targets) targets.push_back(tomd::parse_baseline_rank(t));
    const auto rep = tomd::run_reconstruction_bench(x, targets, bench_als.config(), bench_target_rse, bench_time);
    emit(tomd::to_json(rep), bench_json, bench_csv, tomd::to_csv(rep));
  } else if (*cl) {
    const auto d = tomd::ingest_dataset(cl_flags.manifest);
    const auto cfg = cl_flags.config();
    const auto rep = tomd::run_cluster(d, cfg);
    if (!cl_flags.checkpoint.empty()) {
      // re-run is deterministic, so checkpoints can be regenerated on demand
      auto data = d.data;
      data.reshape_dims = rep.reshape_dims;
      for (auto seed : rep.config.seeds) {
        tomd::AdmmConfig a = rep.config.admm;
        a.als.seed = seed;
        tomd::save_checkpoint((fs::path(cl_flags.checkpoint) / ("seed-" + std::to_string(seed))).string(),
                              tomd::admm_solve(data, a));
      }
    }
    emit(tomd::to_json(rep), cl_flags.json_out, cl_flags.csv_out, tomd::to_csv(rep));
  } else if (*sw) {
    const auto d = tomd::ingest_dataset(sw_flags.manifest);
    const auto cfg = sw_flags.config();
    std::vector<tomd::TomdRank> ranks;
    for (const auto& r : sw_ranks) ranks.push_back(tomd::parse_tomd_rank(r));
    const auto rep = tomd::run_param_sweep(d, cfg, sw_mu, sw_k, ranks);
    emit(tomd::to_json(rep), sw_flags.json_out, sw_flags.csv_out, tomd::to_csv(rep));
  } else if (*me) {
    const auto pred = tomd::read_labels(me_pred);
    const auto truth = tomd::read_labels(me_truth);
    const auto m = tomd::evaluate(pred, truth, me_nmi == "arithmetic" ? tomd::NmiNorm::arithmetic : tomd::NmiNorm::geometric);
    json j = tomd::to_json(m);
    j["schema_version"] = tomd::kReportSchemaVersion;
    j["kind"] = "metrics";
    j["n"] = pred.size();
    emit(j, me_json, "", "");
  } else if (*sy) {
    auto d = tomd::make_synthetic(sy_cfg);
    if (sy_dims) {
      const auto dims = parse_dims(*sy_dims);
      if (dims.size() != 3) throw tomd::ValidationError("--reshape-dims needs three entries");
      d.reshape_dims = {dims[0], dims[1], dims[2]};
    }
    tomd::validate(d);
    fs::create_directories(sy_out);
    json views = json::array();
    for (std::size_t v = 0; v < d.views.size(); ++v) {
      const std::string name = "view" + std::to_string(v + 1) + ".csv";
      std::ostringstream os;
      os.precision(17);
      const auto& x = d.views[v];
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index c = 0; c < x.cols(); ++c) os << x(i, c) << (c + 1 < x.cols() ? ',' : '\n');
      write_text((fs::path(sy_out) / name).string(), os.str());
      views.push_back({{"path", name}, {"features", x.rows()}});
    }
    std::ostringstream labels;
    for (int l : *d.labels) labels << l << '\n';
    write_text((fs::path(sy_out) / "labels.csv").string(), labels.str());
    json m{{"name", "synthetic"},
           {"views", views},
           {"labels_path", "labels.csv"},
           {"N", d.samples()},
           {"V", d.view_count()},
           {"reshape_dims", d.reshape_dims},
           {"k", sy_cfg.clusters}};
    write_text((fs::path(sy_out) / "manifest.json").string(), m.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const tomd::NumericalError& e) {
    std::cerr << "tomd: numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const tomd::ValidationError& e) {
    std::cerr << "tomd: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "tomd: " << e.what() << '\n';
    return 1;
  }
}
