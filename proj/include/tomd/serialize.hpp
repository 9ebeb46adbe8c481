#pragma once

// On-disk factor sets: <dir>/header.json plus one tensor text file per named
// part (G1.txt, U1.txt, ...). Matrices are stored as 2-way tensors.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tomd/baselines.hpp"
#include "tomd/tensor.hpp"

namespace tomd {

struct FactorSet {
  BaselineRank rank;
  Shape shape;
  std::uint64_t seed = 0;
  double final_rse = 0.0;
  std::size_t sweeps = 0;
  bool converged = false;
  std::vector<std::pair<std::string, Tensor>> parts;
};

FactorSet factor_set_from(const Decomposition& d, const Shape& shape, std::uint64_t seed);

void save_factor_set(const std::string& dir, const FactorSet& f);
FactorSet load_factor_set(const std::string& dir);

// Rebuilds the full tensor from the named parts of any method.
Tensor reconstruct(const FactorSet& f);

TomdFactors to_tomd_factors(const FactorSet& f);

}  // namespace tomd
