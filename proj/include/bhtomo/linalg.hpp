#pragma once

#include <Eigen/Dense>

#include "bhtomo/common.hpp"

namespace bht {

struct SymEig {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

// Dense real-symmetric eigendecomposition (LAPACK dsyevd, Eigen fallback).
SymEig eig_sym(Eigen::MatrixXd a);

struct GenEig {
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
};

GenEig eig_general(const Eigen::MatrixXd& a);
GenEig eig_general(const Eigen::MatrixXcd& a);

}  // namespace bht
