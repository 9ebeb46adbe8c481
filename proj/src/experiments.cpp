#include "tomd/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "tomd/error.hpp"
#include "tomd/synthetic.hpp"

namespace tomd {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

template <class T>
T get(const json& j, const char* key, const std::string& origin) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IngestError(origin + ": field '" + key + "': " + e.what());
  }
}

std::string resolve(const std::string& base, const std::string& p) {
  if (fs::path(p).is_absolute() || base.empty()) return p;
  return (fs::path(base) / p).string();
}

// Comma-separated when the line has a comma, whitespace-separated otherwise.
// Cells are trimmed; an empty cell between commas comes back empty.
std::vector<std::string_view> cells(std::string_view line) {
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  std::vector<std::string_view> out;
  if (line.find(',') != std::string_view::npos) {
    std::size_t i = 0;
    while (true) {
      const std::size_t j = std::min(line.find(',', i), line.size());
      std::string_view c = line.substr(i, j - i);
      while (!c.empty() && space(c.front())) c.remove_prefix(1);
      while (!c.empty() && space(c.back())) c.remove_suffix(1);
      out.push_back(c);
      if (j == line.size()) break;
      i = j + 1;
    }
    // tolerate a trailing comma
    if (out.size() > 1 && out.back().empty()) out.pop_back();
    return out;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !space(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view s, const std::string& path, std::size_t row) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw IngestError(path + ": row " + std::to_string(row) + ": non-numeric cell '" + std::string(s) + "'");
  return v;
}

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c) || c == ','; });
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string rank_string(const TomdRank& r) { return to_string(r); }

json residuals_json(const Residuals& r) {
  return {{"reconstruction", r.reconstruction},
          {"match", r.match},
          {"reconstruction_mean", r.reconstruction_mean},
          {"match_mean", r.match_mean}};
}

json admm_json(const ExperimentConfig& c) {
  const auto& a = c.admm;
  json j{{"mu", a.mu},
         {"K", a.neighbors},
         {"rank", to_string(a.rank)},
         {"tau0", a.tau0},
         {"beta", a.beta},
         {"tau_max", a.tau_max},
         {"tol", a.tol},
         {"iter_max", a.iter_max},
         {"als_iter_max", a.als.iter_max},
         {"als_tol", a.als.tol_als},
         {"include_self", a.include_self},
         {"warm_start", a.warm_start},
         {"seeds", c.seeds},
         {"nmi", c.nmi_norm == NmiNorm::geometric ? "geometric" : "arithmetic"},
         {"kmeans_replicates", c.spectral.kmeans.replicates}};
  return j;
}

}  // namespace

DatasetManifest parse_manifest(const json& j, const std::string& base_dir, const std::string& origin) {
  if (!j.is_object()) throw IngestError(origin + ": manifest must be a JSON object");
  static const std::set<std::string> known{"name", "views", "labels_path", "N", "V", "reshape_dims", "k", "normalize"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw IngestError(origin + ": unknown manifest field '" + key + "'");
  DatasetManifest m;
  m.base_dir = base_dir;
  m.name = j.contains("name") ? get<std::string>(j, "name", origin) : fs::path(origin).stem().string();
  if (!j.contains("views") || !j["views"].is_array() || j["views"].empty())
    throw IngestError(origin + ": 'views' must be a non-empty array");
  for (const auto& v : j["views"]) {
    ViewSpec s;
    if (v.is_string()) {
      s.path = v.get<std::string>();
    } else {
      s.path = get<std::string>(v, "path", origin);
      if (v.contains("features")) s.features = get<std::size_t>(v, "features", origin);
    }
    m.views.push_back(std::move(s));
  }
  if (j.contains("labels_path") && !j["labels_path"].is_null()) m.labels_path = get<std::string>(j, "labels_path", origin);
  if (j.contains("N")) m.n = get<std::size_t>(j, "N", origin);
  if (j.contains("V")) m.v = get<std::size_t>(j, "V", origin);
  if (j.contains("reshape_dims") && !j["reshape_dims"].is_null()) {
    const auto dims = get<std::vector<std::size_t>>(j, "reshape_dims", origin);
    // (N1, N2, N3) or (N1, N2, N3, V)
    if (dims.size() != 3 && dims.size() != 4) throw IngestError(origin + ": reshape_dims needs 3 entries");
    m.reshape_dims = std::array<std::size_t, 3>{dims[0], dims[1], dims[2]};
  }
  if (j.contains("k") && !j["k"].is_null()) m.k = get<std::size_t>(j, "k", origin);
  if (j.contains("normalize")) m.normalize = get<bool>(j, "normalize", origin);
  return m;
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IngestError("cannot open manifest " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw IngestError(path + ": " + e.what());
  }
  return parse_manifest(j, fs::path(path).parent_path().string(), path);
}

Matrix read_csv_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IngestError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (blank(line)) continue;
    std::vector<double> r;
    for (auto c : cells(line)) r.push_back(parse_double(c, path, lineno));
    if (!rows.empty() && r.size() != rows.front().size())
      throw IngestError(path + ": row " + std::to_string(lineno) + " has " + std::to_string(r.size()) +
                        " cells, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw IngestError(path + ": no data");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

std::vector<int> read_labels(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IngestError("cannot open " + path);
  std::vector<int> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    for (auto c : cells(line)) {
      if (c.empty()) throw IngestError(path + ": row " + std::to_string(lineno) + ": empty cell");
      int v = 0;
      auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || p != c.data() + c.size()) {
        // integral values written as floats ("3.0") are accepted
        const double d = parse_double(c, path, lineno);
        if (d != std::floor(d) || std::abs(d) > 1e9)
          throw IngestError(path + ": row " + std::to_string(lineno) + ": label '" + std::string(c) + "' is not an integer");
        v = static_cast<int>(d);
      }
      out.push_back(v);
    }
  }
  if (out.empty()) throw IngestError(path + ": no labels");
  return out;
}

Dataset ingest_dataset(const DatasetManifest& m) {
  Dataset d;
  d.name = m.name;
  for (std::size_t v = 0; v < m.views.size(); ++v) {
    const auto path = resolve(m.base_dir, m.views[v].path);
    Matrix x = read_csv_matrix(path);
    if (m.views[v].features && static_cast<std::size_t>(x.rows()) != m.views[v].features)
      throw ShapeError("view " + std::to_string(v + 1) + " (" + path + ") has " + std::to_string(x.rows()) +
                       " feature rows, manifest declares " + std::to_string(m.views[v].features));
    if (!d.data.views.empty() && x.cols() != d.data.views.front().cols())
      throw ShapeError("view " + std::to_string(v + 1) + " (" + path + ") has " + std::to_string(x.cols()) +
                       " samples, view 1 has " + std::to_string(d.data.views.front().cols()));
    d.data.views.push_back(std::move(x));
  }
  const std::size_t n = d.data.samples();
  if (m.n && m.n != n)
    throw ShapeError("manifest declares N = " + std::to_string(m.n) + " but the views have " + std::to_string(n) + " samples");
  if (m.v && m.v != d.data.view_count())
    throw ShapeError("manifest declares V = " + std::to_string(m.v) + " but lists " + std::to_string(d.data.view_count()) + " views");
  if (m.labels_path) {
    const auto path = resolve(m.base_dir, *m.labels_path);
    auto labels = read_labels(path);
    if (labels.size() != n)
      throw ShapeError(path + " has " + std::to_string(labels.size()) + " labels, expected N = " + std::to_string(n));
    d.data.labels = std::move(labels);
  }
  if (m.k) {
    d.k = *m.k;
  } else if (d.data.labels) {
    d.k = std::set<int>(d.data.labels->begin(), d.data.labels->end()).size();
  }
  d.data.reshape_dims = m.reshape_dims ? *m.reshape_dims : near_cubic_factorization(n);
  d.reshape_given = m.reshape_dims.has_value();
  if (m.normalize) normalize_columns(d.data);
  validate(d.data);
  return d;
}

Dataset ingest_dataset(const std::string& manifest_path) { return ingest_dataset(load_manifest(manifest_path)); }

const std::vector<Preset>& presets() {
  using D = std::array<std::size_t, 3>;
  static const std::vector<Preset> p{
      {"yale", 10, 1.0, D{165, 15, 11}},          {"msrcv1", 5, 50.0, D{210, 15, 14}},
      {"extendyaleb", 15, 50.0, D{50, 13, 650}},  {"orl", 10, 30.0, D{400, 20, 20}},
      {"reuters", 20, 50.0, D{1200, 20, 60}},
      // the published (200, 10, 200) does not multiply to N^2 = 2000^2
      {"handwritten", 20, 40.0, std::nullopt},
  };
  return p;
}

std::optional<Preset> find_preset(const std::string& name) {
  const auto key = lower(name);
  for (const auto& p : presets())
    if (p.name == key) return p;
  return std::nullopt;
}

TomdRank default_mvc_rank(const std::array<std::size_t, 3>& dims, std::size_t views, std::size_t k) {
  TomdRank r;
  r.outer = {std::min(dims[0], std::max<std::size_t>(1, 2 * k)), dims[1], dims[2], views};
  r.bond.fill(4);
  return r;
}

void apply_preset(ExperimentConfig& cfg, const Preset& p) {
  cfg.admm.neighbors = p.neighbors;
  cfg.admm.mu = p.mu;
  cfg.reshape_dims = p.reshape_dims;
}

void apply_config_json(ExperimentConfig& cfg, const json& j) {
  const std::string origin = "config";
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  static const std::set<std::string> known{"preset", "mu", "K", "rank", "tau0", "beta", "tau_max", "tol",
                                           "iter_max", "als_iter_max", "als_tol", "include_self", "warm_start",
                                           "seeds", "nmi", "kmeans_replicates", "record_time"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw ValidationError("unknown config field '" + key + "'");
  // preset first so explicit fields win
  if (j.contains("preset")) {
    const auto name = get<std::string>(j, "preset", origin);
    const auto p = find_preset(name);
    if (!p) throw ValidationError("unknown preset '" + name + "'");
    apply_preset(cfg, *p);
  }
  auto& a = cfg.admm;
  if (j.contains("mu")) a.mu = get<double>(j, "mu", origin);
  if (j.contains("K")) a.neighbors = get<std::size_t>(j, "K", origin);
  if (j.contains("rank")) {
    a.rank = parse_tomd_rank(get<std::string>(j, "rank", origin));
    cfg.rank_set = true;
  }
  if (j.contains("tau0")) a.tau0 = get<double>(j, "tau0", origin);
  if (j.contains("beta")) a.beta = get<double>(j, "beta", origin);
  if (j.contains("tau_max")) a.tau_max = get<double>(j, "tau_max", origin);
  if (j.contains("tol")) a.tol = get<double>(j, "tol", origin);
  if (j.contains("iter_max")) a.iter_max = get<std::size_t>(j, "iter_max", origin);
  if (j.contains("als_iter_max")) a.als.iter_max = get<std::size_t>(j, "als_iter_max", origin);
  if (j.contains("als_tol")) a.als.tol_als = get<double>(j, "als_tol", origin);
  if (j.contains("include_self")) a.include_self = get<bool>(j, "include_self", origin);
  if (j.contains("warm_start")) a.warm_start = get<bool>(j, "warm_start", origin);
  if (j.contains("seeds")) cfg.seeds = get<std::vector<std::uint64_t>>(j, "seeds", origin);
  if (j.contains("nmi")) {
    const auto n = get<std::string>(j, "nmi", origin);
    if (n == "geometric") cfg.nmi_norm = NmiNorm::geometric;
    else if (n == "arithmetic") cfg.nmi_norm = NmiNorm::arithmetic;
    else throw ValidationError("nmi must be 'geometric' or 'arithmetic', got '" + n + "'");
  }
  if (j.contains("kmeans_replicates")) cfg.spectral.kmeans.replicates = get<std::size_t>(j, "kmeans_replicates", origin);
  if (j.contains("record_time")) cfg.record_time = get<bool>(j, "record_time", origin);
}

MetricSummary summarize(const std::vector<MetricReport>& runs) {
  MetricSummary s;
  if (runs.empty()) return s;
  const double n = static_cast<double>(runs.size());
  auto fields = [](MetricReport& m) {
    return std::array<double*, 6>{&m.f_score, &m.precision, &m.recall, &m.nmi, &m.ar, &m.acc};
  };
  auto mean = fields(s.mean);
  auto sd = fields(s.stddev);
  for (auto r : runs) {
    auto f = fields(r);
    for (std::size_t i = 0; i < 6; ++i) *mean[i] += *f[i] / n;
  }
  if (runs.size() > 1) {
    for (auto r : runs) {
      auto f = fields(r);
      for (std::size_t i = 0; i < 6; ++i) *sd[i] += (*f[i] - *mean[i]) * (*f[i] - *mean[i]);
    }
    for (std::size_t i = 0; i < 6; ++i) *sd[i] = std::sqrt(*sd[i] / (n - 1.0));
  }
  return s;
}

ClusterReport run_cluster(const Dataset& d, const ExperimentConfig& cfg_in) {
  validate(d.data);
  if (d.k < 1) throw ValidationError("cluster count unknown: give k in the manifest or provide labels");
  if (cfg_in.seeds.empty()) throw ValidationError("at least one seed is required");
  ExperimentConfig cfg = cfg_in;
  // a preset's reshape applies only when the manifest gave none
  MultiViewDataset reshaped;
  const MultiViewDataset* data = &d.data;
  if (!d.reshape_given && cfg.reshape_dims && *cfg.reshape_dims != d.data.reshape_dims) {
    const auto& r = *cfg.reshape_dims;
    const std::size_t n = d.data.samples();
    if (r[0] * r[1] * r[2] != n * n)
      throw ValidationError("preset reshape " + std::to_string(r[0]) + "," + std::to_string(r[1]) + "," +
                            std::to_string(r[2]) + " does not multiply to N^2 = " + std::to_string(n * n));
    reshaped = d.data;
    reshaped.reshape_dims = r;
    data = &reshaped;
  }
  if (!cfg.rank_set) {
    cfg.admm.rank = default_mvc_rank(data->reshape_dims, data->view_count(), d.k);
    cfg.rank_set = true;
  }
  validate(cfg.admm, *data);
  if (d.k > d.data.samples()) throw ValidationError("k exceeds the sample count");

  ClusterReport rep;
  rep.dataset = d.name;
  rep.n = d.data.samples();
  rep.v = d.data.view_count();
  rep.k = d.k;
  rep.reshape_dims = data->reshape_dims;
  rep.config = cfg;
  rep.runs.resize(cfg.seeds.size());
  std::vector<Matrix> affinity(cfg.seeds.size());
  std::vector<std::string> errors(cfg.seeds.size());
  std::vector<int> numerical(cfg.seeds.size(), 0);

  const int ns = static_cast<int>(cfg.seeds.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < ns; ++i) {
    try {
      const auto t0 = std::chrono::steady_clock::now();
      AdmmConfig a = cfg.admm;
      a.als.seed = cfg.seeds[i];
      AdmmResult res = admm_solve(*data, a);
      Matrix m = affinity_from_z(res.state.z);
      ClusterAssignment ca = spectral_clustering(m, d.k, cfg.seeds[i], cfg.spectral);
      SeedRun run;
      run.seed = cfg.seeds[i];
      run.labels = std::move(ca.labels);
      if (d.data.labels) run.metrics = evaluate(run.labels, *d.data.labels, cfg.nmi_norm);
      run.trace = std::move(res.trace);
      run.iterations = res.state.iter;
      run.converged = res.state.converged;
      run.seconds = cfg.record_time ? seconds_since(t0) : 0.0;
      rep.runs[i] = std::move(run);
      if (i == 0) affinity[0] = std::move(m);
    } catch (const NumericalError& e) {
      errors[i] = e.what();
      numerical[i] = 1;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i].empty()) continue;
    const auto msg = "seed " + std::to_string(cfg.seeds[i]) + ": " + errors[i];
    if (numerical[i]) throw NumericalError(msg);
    throw ValidationError(msg);
  }
  rep.affinity = std::move(affinity[0]);
  if (d.data.labels) {
    std::vector<MetricReport> ms;
    for (const auto& r : rep.runs) ms.push_back(*r.metrics);
    rep.summary = summarize(ms);
  }
  return rep;
}

SweepReport run_param_sweep(const Dataset& d, const ExperimentConfig& base, const std::vector<double>& mus,
                            const std::vector<std::size_t>& neighbors, const std::vector<TomdRank>& ranks) {
  if (mus.empty() || neighbors.empty()) throw ValidationError("sweep grid is empty");
  SweepReport rep;
  rep.dataset = d.name;
  std::vector<std::optional<TomdRank>> rank_axis;
  if (ranks.empty()) rank_axis.push_back(base.rank_set ? std::optional<TomdRank>(base.admm.rank) : std::nullopt);
  else for (const auto& r : ranks) rank_axis.emplace_back(r);
  for (double mu : mus)
    for (std::size_t k : neighbors)
      for (const auto& r : rank_axis) {
        ExperimentConfig cfg = base;
        cfg.admm.mu = mu;
        cfg.admm.neighbors = k;
        if (r) {
          cfg.admm.rank = *r;
          cfg.rank_set = true;
        }
        ClusterReport cr = run_cluster(d, cfg);
        SweepRow row;
        row.mu = mu;
        row.neighbors = k;
        row.rank = cr.config.admm.rank;
        row.summary = cr.summary;
        for (const auto& run : cr.runs) row.converged_runs += run.converged ? 1 : 0;
        rep.rows.push_back(std::move(row));
      }
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (!rep.rows[i].summary) continue;
    if (!rep.best || rep.rows[i].summary->mean.acc > rep.rows[*rep.best].summary->mean.acc) rep.best = i;
  }
  return rep;
}

BenchReport run_reconstruction_bench(const Tensor& x, const std::vector<BaselineRank>& targets, const AlsConfig& cfg,
                                     std::optional<double> rse_target, bool record_time) {
  if (x.order() != 4) throw ShapeError("the benchmark needs a 4-way tensor, got " + shape_string(x.shape()));
  if (targets.empty()) throw ValidationError("no methods selected");
  for (const auto& t : targets) validate_rank(x.shape(), t);
  BenchReport rep;
  rep.shape = x.shape();
  rep.als = cfg;
  rep.rse_target = rse_target;
  rep.record_time = record_time;
  for (const auto& t : targets) {
    const auto t0 = std::chrono::steady_clock::now();
    Decomposition dec = decompose(x, t, cfg);
    BenchRow row;
    row.seconds = record_time ? seconds_since(t0) : 0.0;
    row.rank = t;
    row.sweeps = dec.report.sweeps;
    row.converged = dec.report.converged;
    row.final_rse = x.is_zero() ? 0.0 : rse(dec.reconstruction, x);
    row.storage = storage_cost(x.shape(), t);
    if (rse_target) row.reached_target = row.final_rse <= *rse_target;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

json to_json(const MetricReport& m) {
  return {{"f_score", m.f_score}, {"precision", m.precision}, {"recall", m.recall},
          {"nmi", m.nmi},         {"ar", m.ar},               {"acc", m.acc}};
}

json to_json(const ClusterReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "cluster";
  j["dataset"] = {{"name", r.dataset}, {"N", r.n}, {"V", r.v}, {"k", r.k}, {"reshape_dims", r.reshape_dims}};
  j["config"] = admm_json(r.config);
  json runs = json::array();
  for (const auto& run : r.runs) {
    json jr{{"seed", run.seed}, {"labels", run.labels}, {"iterations", run.iterations}, {"converged", run.converged}};
    if (run.metrics) jr["metrics"] = to_json(*run.metrics);
    json tr = json::array();
    for (const auto& t : run.trace)
      tr.push_back({{"iter", t.iter}, {"tau", t.tau}, {"als_sweeps", t.als_sweeps}, {"residuals", residuals_json(t.residuals)}});
    jr["trace"] = tr;
    if (r.config.record_time) jr["seconds"] = run.seconds;
    runs.push_back(std::move(jr));
  }
  j["runs"] = runs;
  if (r.summary) j["summary"] = {{"mean", to_json(r.summary->mean)}, {"std", to_json(r.summary->stddev)}};
  json aff = json::array();
  for (Eigen::Index i = 0; i < r.affinity.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(r.affinity.cols()));
    for (Eigen::Index c = 0; c < r.affinity.cols(); ++c) row[static_cast<std::size_t>(c)] = r.affinity(i, c);
    aff.push_back(row);
  }
  j["affinity"] = {{"seed", r.runs.empty() ? 0 : r.runs.front().seed}, {"matrix", aff}};
  return j;
}

json to_json(const SweepReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "sweep";
  j["dataset"] = r.dataset;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr{{"mu", row.mu}, {"K", row.neighbors}, {"rank", rank_string(row.rank)}, {"converged_runs", row.converged_runs}};
    if (row.summary) jr["summary"] = {{"mean", to_json(row.summary->mean)}, {"std", to_json(row.summary->stddev)}};
    rows.push_back(std::move(jr));
  }
  j["rows"] = rows;
  if (r.best) j["best"] = *r.best;
  else j["best"] = nullptr;
  return j;
}

json to_json(const BenchReport& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = "reconstruct-bench";
  j["shape"] = r.shape;
  j["als"] = {{"iter_max", r.als.iter_max}, {"tol", r.als.tol_als}, {"seed", r.als.seed}};
  if (r.rse_target) j["rse_target"] = *r.rse_target;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr{{"method", to_string(row.rank.variant)},
            {"rank", row.rank.ranks},
            {"sweeps", row.sweeps},
            {"converged", row.converged},
            {"final_rse", row.final_rse},
            {"storage_cost", row.storage}};
    if (row.reached_target) jr["reached_target"] = *row.reached_target;
    if (r.record_time) jr["seconds"] = row.seconds;
    rows.push_back(std::move(jr));
  }
  j["rows"] = rows;
  return j;
}

namespace {

std::string metric_cells(const MetricReport& m) {
  return fmt(m.f_score) + "," + fmt(m.precision) + "," + fmt(m.recall) + "," + fmt(m.nmi) + "," + fmt(m.ar) + "," + fmt(m.acc);
}

const char* kMetricHeader = "f_score,precision,recall,nmi,ar,acc";

}  // namespace

std::string to_csv(const ClusterReport& r) {
  std::ostringstream os;
  os << "row,seed,iterations,converged," << kMetricHeader << (r.config.record_time ? ",seconds" : "") << '\n';
  for (const auto& run : r.runs) {
    os << "run," << run.seed << ',' << run.iterations << ',' << (run.converged ? 1 : 0) << ',';
    os << (run.metrics ? metric_cells(*run.metrics) : std::string(",,,,,"));
    if (r.config.record_time) os << ',' << fmt(run.seconds);
    os << '\n';
  }
  if (r.summary) {
    const char* tail = r.config.record_time ? "," : "";
    os << "mean,,,," << metric_cells(r.summary->mean) << tail << '\n';
    os << "std,,,," << metric_cells(r.summary->stddev) << tail << '\n';
  }
  return os.str();
}

std::string to_csv(const SweepReport& r) {
  std::ostringstream os;
  os << "mu,K,rank,converged_runs,acc_mean,acc_std,nmi_mean,nmi_std,f_score_mean,ar_mean,best\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    os << fmt(row.mu) << ',' << row.neighbors << ",\"" << rank_string(row.rank) << "\"," << row.converged_runs << ',';
    if (row.summary) {
      const auto& s = *row.summary;
      os << fmt(s.mean.acc) << ',' << fmt(s.stddev.acc) << ',' << fmt(s.mean.nmi) << ',' << fmt(s.stddev.nmi) << ','
         << fmt(s.mean.f_score) << ',' << fmt(s.mean.ar);
    } else {
      os << ",,,,,";
    }
    os << ',' << (r.best && *r.best == i ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string to_csv(const BenchReport& r) {
  std::ostringstream os;
  os << "method,rank,sweeps,converged,final_rse,storage_cost" << (r.rse_target ? ",reached_target" : "")
     << (r.record_time ? ",seconds" : "") << '\n';
  for (const auto& row : r.rows) {
    std::string rank;
    for (std::size_t i = 0; i < row.rank.ranks.size(); ++i) rank += (i ? "," : "") + std::to_string(row.rank.ranks[i]);
    os << to_string(row.rank.variant) << ",\"" << rank << "\"," << row.sweeps << ',' << (row.converged ? 1 : 0) << ','
       << fmt(row.final_rse) << ',' << row.storage;
    if (row.reached_target) os << ',' << (*row.reached_target ? 1 : 0);
    if (r.record_time) os << ',' << fmt(row.seconds);
    os << '\n';
  }
  return os.str();
}

}  // namespace tomd
