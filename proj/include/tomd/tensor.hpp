#pragma once

// Dense N-way tensors and the multilinear primitives built on them.
//
// Linearization is first-index-fastest (column-major) everywhere: the entry
// (i_0, ..., i_{N-1}) lives at i_0 + I_0 * (i_1 + I_1 * (i_2 + ...)). A
// matrix is a 2-way tensor whose buffer is exactly an Eigen::MatrixXd buffer.
// Mode indices are 0-based.

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tomd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Shape = std::vector<std::size_t>;

std::size_t element_count(std::span<const std::size_t> shape);
std::string shape_string(std::span<const std::size_t> shape);

class Tensor {
 public:
  // 1-element tensor of shape (1) holding 0.
  Tensor();
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);
  Tensor(std::initializer_list<std::size_t> shape) : Tensor(Shape(shape)) {}

  static Tensor from_matrix(const Matrix& m);
  static Tensor from_vector(std::span<const double> v);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t order() const noexcept { return shape_.size(); }
  std::size_t extent(std::size_t mode) const;
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  double operator[](std::size_t linear) const { return data_[linear]; }
  double& operator[](std::size_t linear) { return data_[linear]; }

  std::size_t linear_index(std::span<const std::size_t> idx) const;
  double at(std::span<const std::size_t> idx) const { return data_[linear_index(idx)]; }
  double& at(std::span<const std::size_t> idx) { return data_[linear_index(idx)]; }
  double at(std::initializer_list<std::size_t> idx) const {
    return at(std::span<const std::size_t>(idx.begin(), idx.size()));
  }
  double& at(std::initializer_list<std::size_t> idx) {
    return at(std::span<const std::size_t>(idx.begin(), idx.size()));
  }

  double norm() const;
  bool is_zero() const;

  // Buffer viewed as a rows x cols column-major matrix; rows * cols == size().
  Eigen::Map<const Matrix> as_matrix(std::size_t rows, std::size_t cols) const;
  Matrix to_matrix() const;  // requires order() == 2

  Tensor& operator*=(double c);
  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

Tensor operator-(Tensor a, const Tensor& b);
Tensor operator+(Tensor a, const Tensor& b);
Tensor operator*(double c, Tensor t);

// Mode-n matricization, I_n x prod_{m != n} I_m, remaining modes in increasing
// order with the lowest varying fastest.
Matrix mode_n_unfold(const Tensor& t, std::size_t mode);
Tensor mode_n_fold(const Matrix& m, std::size_t mode, const Shape& shape);

// (I_0 ... I_{split-1}) x (I_split ... I_{N-1}); a relabeling of the buffer.
Matrix n_unfold(const Tensor& t, std::size_t split);

// t x_mode m, with m of size J x I_mode.
Tensor mode_n_product(const Tensor& t, const Matrix& m, std::size_t mode);

// Pure relabeling of the linear buffer under a new shape.
Tensor reshape_phi(const Tensor& t, const Shape& shape);

// Axis k of the result is axis perm[k] of t.
Tensor permute(const Tensor& t, std::span<const std::size_t> perm);

double frobenius_distance(const Tensor& a, const Tensor& b);

// ||approx - ref||_F / ||ref||_F. Throws DegenerateReferenceError if ref == 0.
double rse(const Tensor& approx, const Tensor& ref);

// Plain-text format: first line the space-separated extents, then one scalar
// per line in linearization order, printed with round-trip precision.
void write_tensor(std::ostream& os, const Tensor& t);
Tensor read_tensor(std::istream& is);
void save_tensor(const std::string& path, const Tensor& t);
Tensor load_tensor(const std::string& path);

}  // namespace tomd
