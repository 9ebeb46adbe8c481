#pragma once

// TOMD: Tucker factors around a loop-plus-bridge core, for 4-way tensors.
//
//   X = TC(G1, G2, G3, G4, G5) x_1 U1 x_2 U2 x_3 U3 x_4 U4
//
// The core is a four-node ring G1 - G2 - G3 - G4 - G1 over bonds D1..D4 with
// a bridge matrix G5 joining the two non-adjacent nodes G1 and G3 over D5, D6:
//
//   G1: D4 x R1 x D1 x D5     G2: D1 x R2 x D2
//   G3: D2 x R3 x D3 x D6     G4: D3 x R4 x D4     G5: D5 x D6
//
// and each U_n is I_n x R_n.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tomd/tensor.hpp"

namespace tomd {

struct TomdRank {
  std::array<std::size_t, 4> outer{1, 1, 1, 1};      // R1..R4
  std::array<std::size_t, 6> bond{1, 1, 1, 1, 1, 1};  // D1..D6

  static TomdRank uniform(std::size_t r) {
    TomdRank k;
    k.outer.fill(r);
    k.bond.fill(r);
    return k;
  }
  friend bool operator==(const TomdRank&, const TomdRank&) = default;
};

// Parses "R1,R2,R3,R4,D1,...,D6".
TomdRank parse_tomd_rank(const std::string& text);
std::string to_string(const TomdRank& rank);

// Throws RankError unless every entry is >= 1 and R_i <= I_i.
void validate_rank(const Shape& shape, const TomdRank& rank);

struct TomdFactors {
  std::array<Tensor, 5> cores;    // G1..G4, then the bridge G5 as a D5 x D6 tensor
  std::array<Matrix, 4> factors;  // U1..U4

  TomdRank rank() const;
  Shape target_shape() const;
  std::size_t parameter_count() const;
};

// Core tensor shapes implied by a rank.
std::array<Shape, 5> tomd_core_shapes(const TomdRank& rank);

// Throws ShapeError if the factor shapes are not mutually consistent.
void validate_factors(const TomdFactors& f);

struct AlsConfig {
  std::size_t iter_max = 500;
  double tol_als = 1e-12;
  std::uint64_t seed = 0;
  // Record the objective after every block update (costs one reconstruction
  // per block); used to check monotonicity.
  bool record_block_objectives = false;
};

struct AlsReport {
  std::vector<double> trace;             // RSE after each sweep
  std::vector<double> block_objectives;  // RSE after each block update, if recorded
  std::size_t sweeps = 0;
  bool converged = false;                // stop rule met before iter_max
  double final_rse = 0.0;                // 0 for an all-zero target
};

struct TomdResult {
  TomdFactors factors;
  AlsReport report;
};

// R1 x R2 x R3 x R4 contraction of the five core factors.
Tensor tomd_core(const TomdFactors& f);
Tensor tomd_reconstruct(const TomdFactors& f);

// Total stored scalars of a TOMD at this rank.
std::size_t storage_cost(const Shape& shape, const TomdRank& rank);

// Outer factors from truncated SVDs of the mode unfoldings; cores seeded
// pseudo-random and rescaled so that ||reconstruction|| = ||x||.
TomdFactors tomd_init(const Tensor& x, const TomdRank& rank, std::uint64_t seed);

// Random factors with standard-normal entries (test and synthetic data helper).
TomdFactors random_tomd_factors(const Shape& shape, const TomdRank& rank, std::uint64_t seed);

TomdResult tomd_als(const Tensor& x, const TomdRank& rank, const AlsConfig& cfg);
// Warm start from existing factors (their shapes fix the rank).
TomdResult tomd_als(const Tensor& x, TomdFactors initial, const AlsConfig& cfg);

}  // namespace tomd
