#include "tomd/serialize.hpp"

#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "tomd/error.hpp"
#include "tomd/mvc.hpp"

namespace tomd {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

void write_json(const fs::path& p, const json& j) {
  std::ofstream os(p);
  if (!os) throw IngestError("cannot write " + p.string());
  os << j.dump(2) << '\n';
  if (!os) throw IngestError("failed writing " + p.string());
}

json read_json(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw IngestError("cannot open " + p.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw IngestError(p.string() + ": " + e.what());
  }
}

template <class T>
T field(const json& j, const char* key, const fs::path& where) {
  if (!j.contains(key)) throw IngestError(where.string() + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw IngestError(where.string() + ": field '" + key + "': " + e.what());
  }
}

const Tensor& part(const FactorSet& f, const std::string& name) {
  for (const auto& [n, t] : f.parts)
    if (n == name) return t;
  throw IngestError("factor set has no part '" + name + "'");
}

Matrix part_matrix(const FactorSet& f, const std::string& name) {
  const Tensor& t = part(f, name);
  if (t.order() != 2) throw ShapeError("part " + name + " should be a matrix, got " + shape_string(t.shape()));
  return t.to_matrix();
}

std::array<Matrix, 4> outer_factors(const FactorSet& f) {
  std::array<Matrix, 4> u;
  for (std::size_t n = 0; n < 4; ++n) u[n] = part_matrix(f, "U" + std::to_string(n + 1));
  return u;
}

template <std::size_t K>
std::array<Tensor, K> cores(const FactorSet& f) {
  std::array<Tensor, K> g;
  for (std::size_t k = 0; k < K; ++k) g[k] = part(f, "G" + std::to_string(k + 1));
  return g;
}

}  // namespace

FactorSet factor_set_from(const Decomposition& d, const Shape& shape, std::uint64_t seed) {
  FactorSet f;
  f.rank = d.rank;
  f.shape = shape;
  f.seed = seed;
  f.final_rse = d.report.final_rse;
  f.sweeps = d.report.sweeps;
  f.converged = d.report.converged;
  f.parts = d.parts;
  return f;
}

void save_factor_set(const std::string& dir, const FactorSet& f) {
  fs::create_directories(dir);
  json h;
  h["format"] = "tomd-factors";
  h["version"] = 1;
  h["method"] = to_string(f.rank.variant);
  h["rank"] = f.rank.ranks;
  h["shape"] = f.shape;
  h["seed"] = f.seed;
  h["final_rse"] = f.final_rse;
  h["sweeps"] = f.sweeps;
  h["converged"] = f.converged;
  json parts = json::array();
  for (const auto& [name, t] : f.parts) {
    parts.push_back({{"name", name}, {"file", name + ".txt"}});
    save_tensor((fs::path(dir) / (name + ".txt")).string(), t);
  }
  h["parts"] = parts;
  write_json(fs::path(dir) / "header.json", h);
}

FactorSet load_factor_set(const std::string& dir) {
  const fs::path hp = fs::path(dir) / "header.json";
  const json h = read_json(hp);
  if (field<std::string>(h, "format", hp) != "tomd-factors") throw IngestError(hp.string() + ": not a factor set");
  FactorSet f;
  f.rank.variant = parse_method(field<std::string>(h, "method", hp));
  f.rank.ranks = field<std::vector<std::size_t>>(h, "rank", hp);
  f.shape = field<Shape>(h, "shape", hp);
  f.seed = field<std::uint64_t>(h, "seed", hp);
  f.final_rse = field<double>(h, "final_rse", hp);
  f.sweeps = field<std::size_t>(h, "sweeps", hp);
  f.converged = field<bool>(h, "converged", hp);
  for (const auto& p : field<json>(h, "parts", hp)) {
    const auto name = field<std::string>(p, "name", hp);
    f.parts.emplace_back(name, load_tensor((fs::path(dir) / field<std::string>(p, "file", hp)).string()));
  }
  validate_rank(f.shape, f.rank);
  return f;
}

TomdFactors to_tomd_factors(const FactorSet& f) {
  if (f.rank.variant != Method::tomd) throw ValidationError("factor set holds " + to_string(f.rank.variant) + ", not tomd");
  TomdFactors t;
  t.cores = cores<5>(f);
  t.factors = outer_factors(f);
  validate_factors(t);
  return t;
}

Tensor reconstruct(const FactorSet& f) {
  switch (f.rank.variant) {
    case Method::tucker:
      return reconstruct(TuckerFactors{part(f, "G"), outer_factors(f)});
    case Method::tutr:
      return reconstruct(TutrFactors{cores<4>(f), outer_factors(f)});
    case Method::ominus:
      return reconstruct(OminusFactors{cores<5>(f)});
    case Method::tomd:
      return tomd_reconstruct(to_tomd_factors(f));
  }
  throw ValidationError("unknown method");
}

// ADMM checkpoints

namespace {

json residuals_json(const Residuals& r) {
  return {{"reconstruction", r.reconstruction},
          {"match", r.match},
          {"reconstruction_mean", r.reconstruction_mean},
          {"match_mean", r.match_mean}};
}

Residuals residuals_from(const json& j, const fs::path& where) {
  Residuals r;
  r.reconstruction = field<double>(j, "reconstruction", where);
  r.match = field<double>(j, "match", where);
  r.reconstruction_mean = field<double>(j, "reconstruction_mean", where);
  r.match_mean = field<double>(j, "match_mean", where);
  return r;
}

}  // namespace

void save_checkpoint(const std::string& dir, const AdmmResult& r) {
  fs::create_directories(dir);
  const fs::path d(dir);
  const auto& st = r.state;
  json h;
  h["format"] = "tomd-admm-checkpoint";
  h["version"] = 1;
  h["tau"] = st.tau;
  h["iter"] = st.iter;
  h["converged"] = st.converged;
  h["residuals"] = residuals_json(st.residuals);
  json trace = json::array();
  for (const auto& t : r.trace)
    trace.push_back({{"iter", t.iter}, {"tau", t.tau}, {"als_sweeps", t.als_sweeps}, {"residuals", residuals_json(t.residuals)}});
  h["trace"] = trace;
  h["has_factors"] = st.factors.has_value();
  save_tensor((d / "Z.txt").string(), stack_views(st.z));
  save_tensor((d / "S.txt").string(), stack_views(st.s));
  save_tensor((d / "Y.txt").string(), stack_views(st.y));
  save_tensor((d / "E.txt").string(), Tensor::from_matrix(st.e));
  save_tensor((d / "W.txt").string(), Tensor::from_matrix(st.w));
  save_tensor((d / "M.txt").string(), Tensor::from_matrix(st.m));
  if (st.factors) {
    for (std::size_t k = 0; k < 5; ++k) save_tensor((d / ("G" + std::to_string(k + 1) + ".txt")).string(), st.factors->cores[k]);
    for (std::size_t n = 0; n < 4; ++n)
      save_tensor((d / ("U" + std::to_string(n + 1) + ".txt")).string(), Tensor::from_matrix(st.factors->factors[n]));
  }
  write_json(d / "state.json", h);
}

AdmmResult load_checkpoint(const std::string& dir) {
  const fs::path d(dir);
  const fs::path hp = d / "state.json";
  const json h = read_json(hp);
  if (field<std::string>(h, "format", hp) != "tomd-admm-checkpoint")
    throw IngestError(hp.string() + ": not an ADMM checkpoint");
  AdmmResult r;
  auto& st = r.state;
  st.tau = field<double>(h, "tau", hp);
  st.iter = field<std::size_t>(h, "iter", hp);
  st.converged = field<bool>(h, "converged", hp);
  st.residuals = residuals_from(field<json>(h, "residuals", hp), hp);
  for (const auto& t : field<json>(h, "trace", hp))
    r.trace.push_back({field<std::size_t>(t, "iter", hp), residuals_from(field<json>(t, "residuals", hp), hp),
                       field<double>(t, "tau", hp), field<std::size_t>(t, "als_sweeps", hp)});
  auto matrix = [&](const char* name) {
    const Tensor t = load_tensor((d / name).string());
    if (t.order() != 2) throw IngestError((d / name).string() + ": expected a matrix");
    return t.to_matrix();
  };
  st.z = unstack_views(load_tensor((d / "Z.txt").string()));
  st.s = unstack_views(load_tensor((d / "S.txt").string()));
  st.y = unstack_views(load_tensor((d / "Y.txt").string()));
  st.e = matrix("E.txt");
  st.w = matrix("W.txt");
  st.m = matrix("M.txt");
  if (field<bool>(h, "has_factors", hp)) {
    TomdFactors f;
    for (std::size_t k = 0; k < 5; ++k) f.cores[k] = load_tensor((d / ("G" + std::to_string(k + 1) + ".txt")).string());
    for (std::size_t n = 0; n < 4; ++n) f.factors[n] = matrix(("U" + std::to_string(n + 1) + ".txt").c_str());
    validate_factors(f);
    st.factors = std::move(f);
  }
  return r;
}

}  // namespace tomd
