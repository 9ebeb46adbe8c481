#pragma once

// Data-parallel inner loops. Every kernel exists twice: an OpenMP version in
// tomd::kernels and a plain serial version in tomd::kernels::serial that is
// kept as the reference for tests and benchmarks.
//
// Tensor buffers are first-index-fastest. Mode-wise kernels view an N-way
// buffer as a (left, mid, right) block where mid is the extent of the mode
// being touched, left the product of the lower extents and right the product
// of the higher ones.
//
// Each output element is produced by exactly one thread with a fixed
// summation order, so parallel results do not depend on the thread count.

#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace tomd::kernels {

struct ModeBlock {
  std::size_t left = 1;
  std::size_t mid = 1;
  std::size_t right = 1;
};

// out is mid x (left*right), column-major, Kolda-Bader column order.
void unfold_mode(std::span<const double> in, ModeBlock b, std::span<double> out);
void fold_mode(std::span<const double> in, ModeBlock b, std::span<double> out);

// out(l, j, r) = sum_i m(j, i) * in(l, i, r); out has extents (left, m.rows(), right).
void mode_product(std::span<const double> in, ModeBlock b, const Eigen::MatrixXd& m,
                  std::span<double> out);

// Axis k of the output is axis perm[k] of the input.
void permute(std::span<const double> in, std::span<const std::size_t> shape,
             std::span<const std::size_t> perm, std::span<double> out);

// d(i, j) = sum_v ||views[v].col(i) - views[v].col(j)||^2, computed by direct
// differences (no Gram-matrix cancellation).
Eigen::MatrixXd pairwise_sq_distances(std::span<const Eigen::MatrixXd> views);

// Column-wise l2 shrinkage: col_i <- max(0, 1 - threshold/||col_i||) col_i.
Eigen::MatrixXd column_shrink(const Eigen::MatrixXd& h, double threshold);

namespace serial {

void unfold_mode(std::span<const double> in, ModeBlock b, std::span<double> out);
void fold_mode(std::span<const double> in, ModeBlock b, std::span<double> out);
void mode_product(std::span<const double> in, ModeBlock b, const Eigen::MatrixXd& m,
                  std::span<double> out);
void permute(std::span<const double> in, std::span<const std::size_t> shape,
             std::span<const std::size_t> perm, std::span<double> out);
Eigen::MatrixXd pairwise_sq_distances(std::span<const Eigen::MatrixXd> views);
Eigen::MatrixXd column_shrink(const Eigen::MatrixXd& h, double threshold);

}  // namespace serial

}  // namespace tomd::kernels
