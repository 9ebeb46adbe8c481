#include "tomd/tensor.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tomd/error.hpp"
#include "tomd/kernels.hpp"

namespace tomd {

namespace {

void check_shape(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor must have at least one mode");
  for (auto e : shape)
    if (e == 0) throw ShapeError("tensor extents must be positive, got " + shape_string(shape));
}

void check_mode(const Tensor& t, std::size_t mode) {
  if (mode >= t.order())
    throw ModeIndexError("mode " + std::to_string(mode) + " out of range for order-" +
                         std::to_string(t.order()) + " tensor");
}

kernels::ModeBlock block_of(const Shape& shape, std::size_t mode) {
  kernels::ModeBlock b;
  for (std::size_t k = 0; k < mode; ++k) b.left *= shape[k];
  b.mid = shape[mode];
  for (std::size_t k = mode + 1; k < shape.size(); ++k) b.right *= shape[k];
  return b;
}

}  // namespace

std::size_t element_count(std::span<const std::size_t> shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(std::span<const std::size_t> shape) {
  std::string s = "(";
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(shape[k]);
  }
  return s + ")";
}

Tensor::Tensor() : shape_{1}, data_(1, 0.0) {}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  check_shape(shape_);
  data_.assign(element_count(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  check_shape(shape_);
  if (data_.size() != element_count(shape_))
    throw ShapeError("buffer holds " + std::to_string(data_.size()) + " values but shape " +
                     shape_string(shape_) + " needs " + std::to_string(element_count(shape_)));
}

Tensor Tensor::from_matrix(const Matrix& m) {
  return Tensor({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                std::vector<double>(m.data(), m.data() + m.size()));
}

Tensor Tensor::from_vector(std::span<const double> v) {
  return Tensor({v.size()}, std::vector<double>(v.begin(), v.end()));
}

std::size_t Tensor::extent(std::size_t mode) const {
  check_mode(*this, mode);
  return shape_[mode];
}

std::size_t Tensor::linear_index(std::span<const std::size_t> idx) const {
  if (idx.size() != shape_.size()) throw ModeIndexError("index arity does not match tensor order");
  std::size_t lin = 0;
  for (std::size_t k = idx.size(); k-- > 0;) {
    if (idx[k] >= shape_[k]) throw ModeIndexError("index out of range");
    lin = lin * shape_[k] + idx[k];
  }
  return lin;
}

double Tensor::norm() const {
  return Eigen::Map<const Vector>(data_.data(), static_cast<Eigen::Index>(data_.size())).norm();
}

bool Tensor::is_zero() const {
  for (double v : data_)
    if (v != 0.0) return false;
  return true;
}

Eigen::Map<const Matrix> Tensor::as_matrix(std::size_t rows, std::size_t cols) const {
  if (rows * cols != data_.size()) throw ShapeError("matrix view does not cover the buffer");
  return {data_.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}

Matrix Tensor::to_matrix() const {
  if (order() != 2) throw ShapeError("to_matrix needs a 2-way tensor, got " + shape_string(shape_));
  return as_matrix(shape_[0], shape_[1]);
}

Tensor& Tensor::operator*=(double c) {
  for (double& v : data_) v *= c;
  return *this;
}

Tensor& Tensor::operator+=(const Tensor& other) {
  if (other.shape_ != shape_) throw ShapeError("shape mismatch in tensor addition");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  if (other.shape_ != shape_) throw ShapeError("shape mismatch in tensor subtraction");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator*(double c, Tensor t) { return t *= c; }

Matrix mode_n_unfold(const Tensor& t, std::size_t mode) {
  check_mode(t, mode);
  const auto b = block_of(t.shape(), mode);
  Matrix m(static_cast<Eigen::Index>(b.mid), static_cast<Eigen::Index>(b.left * b.right));
  kernels::unfold_mode(t.data(), b, {m.data(), static_cast<std::size_t>(m.size())});
  return m;
}

Tensor mode_n_fold(const Matrix& m, std::size_t mode, const Shape& shape) {
  Tensor t(shape);
  check_mode(t, mode);
  const auto b = block_of(shape, mode);
  if (static_cast<std::size_t>(m.rows()) != b.mid ||
      static_cast<std::size_t>(m.cols()) != b.left * b.right)
    throw ShapeError("cannot fold a " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     " matrix along mode " + std::to_string(mode) + " into " + shape_string(shape));
  kernels::fold_mode({m.data(), static_cast<std::size_t>(m.size())}, b, t.data());
  return t;
}

Matrix n_unfold(const Tensor& t, std::size_t split) {
  if (split == 0 || split >= t.order())
    throw ModeIndexError("n-unfolding split " + std::to_string(split) + " out of range for order " +
                         std::to_string(t.order()));
  const auto& s = t.shape();
  const std::size_t rows = element_count(std::span(s).first(split));
  return t.as_matrix(rows, t.size() / rows);
}

Tensor mode_n_product(const Tensor& t, const Matrix& m, std::size_t mode) {
  check_mode(t, mode);
  if (static_cast<std::size_t>(m.cols()) != t.shape()[mode])
    throw ShapeError("mode-" + std::to_string(mode) + " product: matrix has " +
                     std::to_string(m.cols()) + " columns, tensor extent is " +
                     std::to_string(t.shape()[mode]));
  Shape out_shape = t.shape();
  out_shape[mode] = static_cast<std::size_t>(m.rows());
  Tensor out(out_shape);
  kernels::mode_product(t.data(), block_of(t.shape(), mode), m, out.data());
  return out;
}

Tensor reshape_phi(const Tensor& t, const Shape& shape) {
  if (element_count(shape) != t.size())
    throw ShapeError("cannot reshape " + shape_string(t.shape()) + " to " + shape_string(shape));
  return Tensor(shape, std::vector<double>(t.data().begin(), t.data().end()));
}

Tensor permute(const Tensor& t, std::span<const std::size_t> perm) {
  if (perm.size() != t.order()) throw ModeIndexError("permutation arity does not match order");
  std::vector<bool> seen(perm.size(), false);
  Shape out_shape(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    if (perm[k] >= perm.size() || seen[perm[k]]) throw ModeIndexError("invalid permutation");
    seen[perm[k]] = true;
    out_shape[k] = t.shape()[perm[k]];
  }
  Tensor out(out_shape);
  kernels::permute(t.data(), t.shape(), perm, out.data());
  return out;
}

double frobenius_distance(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw ShapeError("shape mismatch: " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double rse(const Tensor& approx, const Tensor& ref) {
  const double denom = ref.norm();
  if (denom == 0.0) throw DegenerateReferenceError("RSE undefined for an all-zero reference");
  return frobenius_distance(approx, ref) / denom;
}

void write_tensor(std::ostream& os, const Tensor& t) {
  for (std::size_t k = 0; k < t.order(); ++k) os << (k ? " " : "") << t.shape()[k];
  os << '\n';
  char buf[64];
  for (double v : t.data()) {
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    os.write(buf, end - buf);
    os.put('\n');
  }
}

Tensor read_tensor(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IngestError("tensor file is empty");
  std::istringstream header(line);
  Shape shape;
  long long e = 0;
  while (header >> e) {
    if (e <= 0) throw IngestError("tensor extents must be positive");
    shape.push_back(static_cast<std::size_t>(e));
  }
  if (!header.eof() || shape.empty()) throw IngestError("malformed tensor header: '" + line + "'");
  std::vector<double> data;
  data.reserve(element_count(shape));
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    double v = 0.0;
    const char* b = line.data() + first;
    const char* eptr = line.data() + last + 1;
    auto [ptr, ec] = std::from_chars(b, eptr, v);
    if (ec != std::errc() || ptr != eptr)
      throw IngestError("non-numeric tensor entry on line " + std::to_string(lineno));
    data.push_back(v);
  }
  if (data.size() != element_count(shape))
    throw IngestError("tensor file declares " + shape_string(shape) + " but holds " +
                      std::to_string(data.size()) + " values");
  return Tensor(std::move(shape), std::move(data));
}

void save_tensor(const std::string& path, const Tensor& t) {
  std::ofstream os(path);
  if (!os) throw IngestError("cannot open '" + path + "' for writing");
  write_tensor(os, t);
}

Tensor load_tensor(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IngestError("cannot open tensor file '" + path + "'");
  try {
    return read_tensor(is);
  } catch (const IngestError& e) {
    throw IngestError(path + ": " + e.what());
  }
}

}  // namespace tomd
