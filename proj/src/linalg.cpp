#include "bhtomo/linalg.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>

namespace bht {

SymEig eig_sym(Eigen::MatrixXd a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  SymEig out;
  out.values.resize(n);
  if (n == 0) {
    out.vectors.resize(0, 0);
    return out;
  }
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, a.data(), n, out.values.data());
  if (info != 0)
    throw NumericalError("eig_sym: dsyevd failed (info " + std::to_string(info) + ")");
  out.vectors = std::move(a);
  return out;
}

GenEig eig_general(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("eig_general: real solver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

GenEig eig_general(const Eigen::MatrixXcd& a) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("eig_general: complex solver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace bht
