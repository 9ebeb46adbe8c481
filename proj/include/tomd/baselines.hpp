#pragma once

// Comparison decompositions for the reconstruction benchmark.
//
//   tucker  dense R1 x R2 x R3 x R4 core inside factor matrices (HOOI-style ALS)
//   tutr    TOMD without the bridge: ring cores D_{n-1} x R_n x D_n inside factors
//   ominus  TOMD without factor matrices: the five cores carry I_n directly

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tomd/tensor.hpp"
#include "tomd/tomd.hpp"

namespace tomd {

enum class Method { tucker, tutr, ominus, tomd };

std::string to_string(Method m);
Method parse_method(const std::string& name);

// Variant plus its rank vector:
//   tucker R1..R4 | tutr R1..R4,D1..D4 | ominus D1..D6 | tomd R1..R4,D1..D6
struct BaselineRank {
  Method variant = Method::tomd;
  std::vector<std::size_t> ranks;
};

// "tomd:2,2,2,2,2,2,2,2,2,2" style.
BaselineRank parse_baseline_rank(const std::string& text);
std::string to_string(const BaselineRank& r);
void validate_rank(const Shape& shape, const BaselineRank& r);
std::size_t storage_cost(const Shape& shape, const BaselineRank& r);

struct TuckerFactors {
  Tensor core;
  std::array<Matrix, 4> factors;
};

struct TutrFactors {
  std::array<Tensor, 4> cores;
  std::array<Matrix, 4> factors;
};

struct OminusFactors {
  std::array<Tensor, 5> cores;
};

Tensor reconstruct(const TuckerFactors& f);
Tensor reconstruct(const TutrFactors& f);
Tensor reconstruct(const OminusFactors& f);

struct TuckerResult {
  TuckerFactors factors;
  AlsReport report;
};
struct TutrResult {
  TutrFactors factors;
  AlsReport report;
};
struct OminusResult {
  OminusFactors factors;
  AlsReport report;
};

TuckerResult tucker_als(const Tensor& x, const std::array<std::size_t, 4>& ranks, const AlsConfig& cfg);
TutrResult tutr_als(const Tensor& x, const std::array<std::size_t, 4>& ranks,
                    const std::array<std::size_t, 4>& bonds, const AlsConfig& cfg);
OminusResult ominus_als(const Tensor& x, const std::array<std::size_t, 6>& bonds, const AlsConfig& cfg);

// Method-agnostic result used by the benchmark harness and serialization.
struct Decomposition {
  BaselineRank rank;
  std::vector<std::pair<std::string, Tensor>> parts;  // named factors (G1.., U1..)
  Tensor reconstruction;
  AlsReport report;
  std::size_t stored_scalars = 0;  // exact count over `parts`
};

Decomposition decompose(const Tensor& x, const BaselineRank& rank, const AlsConfig& cfg);

}  // namespace tomd
