#pragma once

// Dataset ingestion and the experiment drivers behind the CLI: the
// reconstruction benchmark, the clustering pipeline and parameter sweeps.
// Reports are plain structs with JSON / CSV renderers.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tomd/baselines.hpp"
#include "tomd/cluster.hpp"
#include "tomd/metrics.hpp"
#include "tomd/mvc.hpp"

namespace tomd {

inline constexpr int kReportSchemaVersion = 1;

// Manifest (JSON):
//   { "name": "yale", "views": [{"path": "v1.csv", "features": 4096}, ...],
//     "labels_path": "labels.csv", "N": 165, "V": 3,
//     "reshape_dims": [33, 25, 33], "k": 15, "normalize": false }
// Paths are relative to the manifest's directory. reshape_dims, k, labels_path
// and normalize are optional.
struct ViewSpec {
  std::string path;
  std::size_t features = 0;
};

struct DatasetManifest {
  std::string name;
  std::vector<ViewSpec> views;
  std::optional<std::string> labels_path;
  std::size_t n = 0;
  std::size_t v = 0;
  std::optional<std::array<std::size_t, 3>> reshape_dims;
  std::optional<std::size_t> k;
  bool normalize = false;
  std::string base_dir;  // directory the relative paths resolve against
};

DatasetManifest parse_manifest(const nlohmann::json& j, const std::string& base_dir, const std::string& origin);
DatasetManifest load_manifest(const std::string& path);

// Comma separated numbers (whitespace separated on lines without a comma),
// one matrix row per line. Blank lines are skipped.
Matrix read_csv_matrix(const std::string& path);
// N integers, any number per line, split the same way as CSV rows.
std::vector<int> read_labels(const std::string& path);

struct Dataset {
  std::string name;
  MultiViewDataset data;
  std::size_t k = 0;  // 0: unknown (no labels, none declared)
  bool reshape_given = false;  // dims came from the manifest, presets leave them alone
};

Dataset ingest_dataset(const DatasetManifest& m);
Dataset ingest_dataset(const std::string& manifest_path);

struct Preset {
  std::string name;
  std::size_t neighbors = 0;
  double mu = 0.0;
  std::optional<std::array<std::size_t, 3>> reshape_dims;
};

const std::vector<Preset>& presets();
std::optional<Preset> find_preset(const std::string& name);  // case-insensitive

// R1 = min(N1, 2k), R2 = N2, R3 = N3, R4 = V, every bond 4; each entry
// clamped to its extent.
TomdRank default_mvc_rank(const std::array<std::size_t, 3>& dims, std::size_t views, std::size_t k);

struct ExperimentConfig {
  AdmmConfig admm;
  bool rank_set = false;  // false: default_mvc_rank is used
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  SpectralConfig spectral;
  NmiNorm nmi_norm = NmiNorm::geometric;
  bool record_time = false;  // wall times make reports non-reproducible, so opt in
  std::optional<std::array<std::size_t, 3>> reshape_dims;  // from a preset; used unless the manifest has dims
};

// Overrides fields present in j: preset, mu, K, rank ("R1..R4,D1..D6"), tau0,
// beta, tau_max, tol, iter_max, als_iter_max, als_tol, include_self,
// warm_start, seeds, nmi ("geometric" | "arithmetic"), kmeans_replicates,
// record_time. Unknown keys are rejected.
void apply_config_json(ExperimentConfig& cfg, const nlohmann::json& j);
void apply_preset(ExperimentConfig& cfg, const Preset& p);

struct MetricSummary {
  MetricReport mean;
  MetricReport stddev;  // sample standard deviation, 0 for a single run
};
MetricSummary summarize(const std::vector<MetricReport>& runs);

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<int> labels;
  std::optional<MetricReport> metrics;
  std::vector<TraceEntry> trace;
  std::size_t iterations = 0;
  bool converged = false;
  double seconds = 0.0;
};

struct ClusterReport {
  std::string dataset;
  std::size_t n = 0, v = 0, k = 0;
  std::array<std::size_t, 3> reshape_dims{};
  ExperimentConfig config;  // as run, rank resolved
  std::vector<SeedRun> runs;
  std::optional<MetricSummary> summary;
  Matrix affinity;  // from the first seed
};

// Seeds run in parallel; seed s drives both the ALS initialization and k-means.
ClusterReport run_cluster(const Dataset& d, const ExperimentConfig& cfg);

struct SweepRow {
  double mu = 0.0;
  std::size_t neighbors = 0;
  TomdRank rank;
  std::optional<MetricSummary> summary;
  std::size_t converged_runs = 0;
};

struct SweepReport {
  std::string dataset;
  std::vector<SweepRow> rows;  // mu-major, then K, then rank
  std::optional<std::size_t> best;  // highest mean ACC (first on ties)
};

SweepReport run_param_sweep(const Dataset& d, const ExperimentConfig& base, const std::vector<double>& mus,
                            const std::vector<std::size_t>& neighbors, const std::vector<TomdRank>& ranks);

struct BenchRow {
  BaselineRank rank;
  std::size_t sweeps = 0;
  bool converged = false;
  double final_rse = 0.0;
  std::size_t storage = 0;
  std::optional<bool> reached_target;
  double seconds = 0.0;
};

struct BenchReport {
  Shape shape;
  AlsConfig als;
  std::optional<double> rse_target;
  bool record_time = false;
  std::vector<BenchRow> rows;
};

BenchReport run_reconstruction_bench(const Tensor& x, const std::vector<BaselineRank>& targets, const AlsConfig& cfg,
                                     std::optional<double> rse_target, bool record_time);

nlohmann::json to_json(const MetricReport& m);
nlohmann::json to_json(const ClusterReport& r);
nlohmann::json to_json(const SweepReport& r);
nlohmann::json to_json(const BenchReport& r);

std::string to_csv(const ClusterReport& r);  // one row per seed, then mean and std rows
std::string to_csv(const SweepReport& r);
std::string to_csv(const BenchReport& r);

}  // namespace tomd
