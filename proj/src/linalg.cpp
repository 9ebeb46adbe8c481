#include "tomd/linalg.hpp"

#include <string>

#include "tomd/error.hpp"

namespace tomd::linalg {

namespace {

void sign_normalize(Matrix& u, Matrix* v) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    Eigen::Index arg = 0;
    u.col(j).cwiseAbs().maxCoeff(&arg);
    if (u(arg, j) < 0) {
      u.col(j) *= -1.0;
      if (v) v->col(j) *= -1.0;
    }
  }
}

}  // namespace

Matrix least_squares(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows())
    throw ShapeError("least_squares: A has " + std::to_string(a.rows()) + " rows, B has " +
                     std::to_string(b.rows()));
  if (a.size() == 0 || b.cols() == 0) return Matrix::Zero(a.cols(), b.cols());
  if (a.rows() > 2 * a.cols()) {
    // A = QR with orthonormal Q, so pinv(A) = pinv(R) Q^T and R keeps A's
    // singular values; only the small square R goes through the SVD.
    Eigen::HouseholderQR<Matrix> qr(a);
    const Eigen::Index n = a.cols();
    const Matrix r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    Matrix qtb = b;
    qtb.applyOnTheLeft(qr.householderQ().transpose());
    Eigen::BDCSVD<Matrix> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kRankThreshold);
    return svd.solve(qtb.topRows(n));
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kRankThreshold);
  return svd.solve(b);
}

Matrix least_squares_right(const Matrix& a, const Matrix& b) {
  return least_squares(a.transpose(), b.transpose()).transpose();
}

SvdResult truncated_svd(const Matrix& a, std::size_t r) {
  const auto min_dim = static_cast<std::size_t>(std::min(a.rows(), a.cols()));
  if (r < 1 || r > min_dim)
    throw RankError("truncated_svd: rank " + std::to_string(r) + " outside [1, " +
                    std::to_string(min_dim) + "]");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto rr = static_cast<Eigen::Index>(r);
  SvdResult out{svd.matrixU().leftCols(rr), svd.singularValues().head(rr), svd.matrixV().leftCols(rr)};
  sign_normalize(out.u, &out.v);
  return out;
}

Matrix leading_left_singular_vectors(const Matrix& a, std::size_t r) {
  if (r < 1 || r > static_cast<std::size_t>(a.rows()))
    throw RankError("requested " + std::to_string(r) + " left singular vectors of a " +
                    std::to_string(a.rows()) + "-row matrix");
  // Through the Gram matrix when it is small: same subspace, far cheaper for
  // the short-and-wide unfoldings ALS produces.
  Matrix u;
  if (a.cols() > 4 * a.rows()) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a * a.transpose());
    const Eigen::Index n = a.rows();
    u.resize(n, static_cast<Eigen::Index>(r));
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(r); ++j) u.col(j) = eig.eigenvectors().col(n - 1 - j);
  } else {
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU);
    if (static_cast<std::size_t>(svd.matrixU().cols()) >= r) {
      u = svd.matrixU().leftCols(static_cast<Eigen::Index>(r));
    } else {
      // Fewer columns than requested vectors: complete with an orthonormal basis.
      Eigen::BDCSVD<Matrix> full(a, Eigen::ComputeFullU);
      u = full.matrixU().leftCols(static_cast<Eigen::Index>(r));
    }
  }
  sign_normalize(u, nullptr);
  return u;
}

EigResult sym_eig_smallest(const Matrix& a, std::size_t k) {
  if (a.rows() != a.cols()) throw ShapeError("sym_eig_smallest needs a square matrix");
  if (k < 1 || k > static_cast<std::size_t>(a.rows()))
    throw RankError("sym_eig_smallest: k = " + std::to_string(k) + " outside [1, " +
                    std::to_string(a.rows()) + "]");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw SymmetryError("sym_eig_smallest: input is not symmetric within 1e-10");
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");
  const auto kk = static_cast<Eigen::Index>(k);
  return {eig.eigenvalues().head(kk), eig.eigenvectors().leftCols(kk)};
}

}  // namespace tomd::linalg
