#include "tomd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace tomd::kernels {

namespace {

// Fixed work-chunk size; chunking never depends on the thread count.
constexpr std::size_t kChunk = 64;

using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
using MutMap = Eigen::Map<Eigen::MatrixXd>;

std::vector<std::size_t> input_strides_for(std::span<const std::size_t> shape,
                                           std::span<const std::size_t> perm) {
  std::vector<std::size_t> stride(shape.size());
  std::size_t s = 1;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    stride[k] = s;
    s *= shape[k];
  }
  std::vector<std::size_t> out(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) out[k] = stride[perm[k]];
  return out;
}

}  // namespace

void unfold_mode(std::span<const double> in, ModeBlock b, std::span<double> out) {
  const auto right = static_cast<std::int64_t>(b.right);
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < right; ++r) {
    for (std::size_t i = 0; i < b.mid; ++i) {
      const double* src = in.data() + b.left * (i + b.mid * r);
      for (std::size_t l = 0; l < b.left; ++l) out[i + b.mid * (l + b.left * r)] = src[l];
    }
  }
}

void fold_mode(std::span<const double> in, ModeBlock b, std::span<double> out) {
  const auto right = static_cast<std::int64_t>(b.right);
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < right; ++r) {
    for (std::size_t i = 0; i < b.mid; ++i) {
      double* dst = out.data() + b.left * (i + b.mid * r);
      for (std::size_t l = 0; l < b.left; ++l) dst[l] = in[i + b.mid * (l + b.left * r)];
    }
  }
}

void mode_product(std::span<const double> in, ModeBlock b, const Eigen::MatrixXd& m,
                  std::span<double> out) {
  const auto rows_out = static_cast<Eigen::Index>(m.rows());
  const auto mid = static_cast<Eigen::Index>(b.mid);
  if (b.left == 1) {
    // out (J x right) = m * in (mid x right), split into fixed column chunks.
    const auto chunks = static_cast<std::int64_t>((b.right + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) {
      const std::size_t c0 = static_cast<std::size_t>(c) * kChunk;
      const auto cols = static_cast<Eigen::Index>(std::min(kChunk, b.right - c0));
      ConstMap src(in.data() + c0 * b.mid, mid, cols);
      MutMap dst(out.data() + c0 * m.rows(), rows_out, cols);
      dst.noalias() = m * src;
    }
    return;
  }
  // Per slab r: out_r (left x J) = in_r (left x mid) * m^T, rows split in fixed chunks.
  const std::size_t row_chunks = (b.left + kChunk - 1) / kChunk;
  const auto tasks = static_cast<std::int64_t>(b.right * row_chunks);
  const Eigen::MatrixXd mt = m.transpose();
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < tasks; ++t) {
    const std::size_t r = static_cast<std::size_t>(t) / row_chunks;
    const std::size_t l0 = (static_cast<std::size_t>(t) % row_chunks) * kChunk;
    const auto rows = static_cast<Eigen::Index>(std::min(kChunk, b.left - l0));
    Eigen::Map<const Eigen::MatrixXd, 0, Eigen::OuterStride<>> src(
        in.data() + b.left * b.mid * r + l0, rows, mid,
        Eigen::OuterStride<>(static_cast<Eigen::Index>(b.left)));
    Eigen::Map<Eigen::MatrixXd, 0, Eigen::OuterStride<>> dst(
        out.data() + b.left * m.rows() * r + l0, rows, rows_out,
        Eigen::OuterStride<>(static_cast<Eigen::Index>(b.left)));
    dst.noalias() = src * mt;
  }
}

void permute(std::span<const double> in, std::span<const std::size_t> shape,
             std::span<const std::size_t> perm, std::span<double> out) {
  const std::size_t n = perm.size();
  std::vector<std::size_t> out_shape(n);
  for (std::size_t k = 0; k < n; ++k) out_shape[k] = shape[perm[k]];
  const auto in_stride = input_strides_for(shape, perm);
  const std::size_t total = out.size();
  const auto chunks = static_cast<std::int64_t>((total + kChunk * 16 - 1) / (kChunk * 16));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk * 16;
    const std::size_t end = std::min(total, begin + kChunk * 16);
    // Decode the starting multi-index, then advance it like an odometer.
    std::vector<std::size_t> idx(n);
    std::size_t rem = begin;
    std::size_t src = 0;
    for (std::size_t k = 0; k < n; ++k) {
      idx[k] = rem % out_shape[k];
      rem /= out_shape[k];
      src += idx[k] * in_stride[k];
    }
    for (std::size_t lin = begin; lin < end; ++lin) {
      out[lin] = in[src];
      for (std::size_t k = 0; k < n; ++k) {
        if (++idx[k] < out_shape[k]) {
          src += in_stride[k];
          break;
        }
        src -= (out_shape[k] - 1) * in_stride[k];
        idx[k] = 0;
      }
    }
  }
}

Eigen::MatrixXd pairwise_sq_distances(std::span<const Eigen::MatrixXd> views) {
  const Eigen::Index n = views.empty() ? 0 : views.front().cols();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
#pragma omp parallel for schedule(dynamic, 4)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (const auto& s : views)
        for (Eigen::Index r = 0; r < s.rows(); ++r) {
          const double diff = s(r, i) - s(r, j);
          acc += diff * diff;
        }
      d(j, i) = acc;
    }
  }
  return d;
}

Eigen::MatrixXd column_shrink(const Eigen::MatrixXd& h, double threshold) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(h.rows(), h.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < h.cols(); ++i) {
    double sq = 0.0;
    for (Eigen::Index r = 0; r < h.rows(); ++r) sq += h(r, i) * h(r, i);
    const double nrm = std::sqrt(sq);
    if (nrm > threshold)
      for (Eigen::Index r = 0; r < h.rows(); ++r) e(r, i) = (nrm - threshold) / nrm * h(r, i);
  }
  return e;
}

namespace serial {

void unfold_mode(std::span<const double> in, ModeBlock b, std::span<double> out) {
  for (std::size_t r = 0; r < b.right; ++r)
    for (std::size_t i = 0; i < b.mid; ++i)
      for (std::size_t l = 0; l < b.left; ++l)
        out[i + b.mid * (l + b.left * r)] = in[l + b.left * (i + b.mid * r)];
}

void fold_mode(std::span<const double> in, ModeBlock b, std::span<double> out) {
  for (std::size_t r = 0; r < b.right; ++r)
    for (std::size_t i = 0; i < b.mid; ++i)
      for (std::size_t l = 0; l < b.left; ++l)
        out[l + b.left * (i + b.mid * r)] = in[i + b.mid * (l + b.left * r)];
}

void mode_product(std::span<const double> in, ModeBlock b, const Eigen::MatrixXd& m,
                  std::span<double> out) {
  const auto rows_out = static_cast<std::size_t>(m.rows());
  for (std::size_t r = 0; r < b.right; ++r)
    for (std::size_t j = 0; j < rows_out; ++j)
      for (std::size_t l = 0; l < b.left; ++l) {
        double acc = 0.0;
        for (std::size_t i = 0; i < b.mid; ++i)
          acc += m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) *
                 in[l + b.left * (i + b.mid * r)];
        out[l + b.left * (j + rows_out * r)] = acc;
      }
}

void permute(std::span<const double> in, std::span<const std::size_t> shape,
             std::span<const std::size_t> perm, std::span<double> out) {
  const std::size_t n = perm.size();
  const auto in_stride = input_strides_for(shape, perm);
  for (std::size_t lin = 0; lin < out.size(); ++lin) {
    std::size_t rem = lin;
    std::size_t src = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t ext = shape[perm[k]];
      src += (rem % ext) * in_stride[k];
      rem /= ext;
    }
    out[lin] = in[src];
  }
}

Eigen::MatrixXd pairwise_sq_distances(std::span<const Eigen::MatrixXd> views) {
  const Eigen::Index n = views.empty() ? 0 : views.front().cols();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (const auto& s : views)
        for (Eigen::Index r = 0; r < s.rows(); ++r) {
          const double diff = s(r, i) - s(r, j);
          acc += diff * diff;
        }
      d(j, i) = acc;
    }
  return d;
}

Eigen::MatrixXd column_shrink(const Eigen::MatrixXd& h, double threshold) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < h.cols(); ++i) {
    double sq = 0.0;
    for (Eigen::Index r = 0; r < h.rows(); ++r) sq += h(r, i) * h(r, i);
    const double nrm = std::sqrt(sq);
    if (nrm > threshold)
      for (Eigen::Index r = 0; r < h.rows(); ++r) e(r, i) = (nrm - threshold) / nrm * h(r, i);
  }
  return e;
}

}  // namespace serial

}  // namespace tomd::kernels
