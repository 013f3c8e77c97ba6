#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bhtomo/fock.hpp"
#include "bhtomo/model.hpp"

namespace bht {

struct EigenSet {
  BlockLabel label;
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXd vectors;   // orthonormal columns, largest component positive
};

// Full spectrum of a built block. A diagonal Hamiltonian (u = 0) is sorted exactly,
// bypassing the eigensolver.
EigenSet diagonalize(const FockBlock& block);

// P(n) over n = 0..N for the inspected orbital, P(n) = sum over basis states with n_k = n of |v_a|^2.
Eigen::VectorXd occupation_distribution(const FockBlock& block, const Eigen::VectorXd& v,
                                        int orbital_index, int particles);

// One-body reduced matrix rho(k,k') = <b+_k b_k'>/N over orbitals.
Eigen::MatrixXd one_body_matrix_orbital(const Model& model, const FockBlock& block,
                                        const Eigen::VectorXd& v);
// Same state in the site basis, rho_ij = <a+_i a_j>/N = F rho_orb F^dagger.
Eigen::MatrixXcd one_body_matrix(const Model& model, const FockBlock& block,
                                 const Eigen::VectorXd& v);

double purity(const Eigen::MatrixXcd& rho);
double purity(const Eigen::MatrixXd& rho);

struct TomoPoint {
  std::string sector;
  int nu;
  double energy;
  double n_o_mean;
  double purity;
  double inv_purity;
};

// One point per eigenstate of each supplied (block, eigenset) pair.
std::vector<TomoPoint> tomographic_spectrum(
    const Model& model,
    const std::vector<std::pair<const FockBlock*, const EigenSet*>>& sectors, int mode_o);

std::string tomo_csv(const std::vector<TomoPoint>& points);

}  // namespace bht
