#pragma once

#include <Eigen/Dense>

#include "bhtomo/model.hpp"

namespace bht {

// Nonlinear eigenstate of the DNLSE: (D + NU P[psi]) psi = mu psi, |psi| = 1.
struct StationaryPoint {
  Eigen::VectorXcd psi;  // site amplitudes, unit norm (real for chains)
  double mu = 0.0;
  int mode = 0;    // orbital label it is continued from
  double u = 0.0;  // interaction at which it was solved
  double residual = 0.0;

  Eigen::VectorXd psi_real() const;  // throws if psi has an imaginary part
  Eigen::VectorXd density() const { return psi.cwiseAbs2(); }
};

struct ContinuationOptions {
  int steps = 0;          // 0: max(50, ceil(20 u_target))
  int max_newton = 50;
  int max_halvings = 10;
  double tol = 1e-12;     // infinity-norm of the Newton residual
};

// Number of interior sign changes of a real profile; nodes are preserved along a branch.
int node_count(const Eigen::VectorXd& psi);

StationaryPoint zero_u_sp(const Model& model, int mode_o);

// Newton continuation in u from the u = 0 orbital up to the model's interaction.
StationaryPoint continue_sp(const Model& model, int mode_o, ContinuationOptions opts = {});

// Continue an already-solved SP to the target model's interaction (incremental scans).
StationaryPoint continue_sp_from(const StationaryPoint& start, const Model& model,
                                 ContinuationOptions opts = {});

struct MuDecomposition {
  double eps_floor;  // -K
  double delta;      // N U / L
  double e_kin;      // mu - eps_floor - delta >= 0
};

MuDecomposition mu_decomposition(const StationaryPoint& sp, const Model& model);

struct SpOccupations {
  Eigen::VectorXd n_over_N;  // per orbital
  double n_sp_over_N;        // inspected orbital share
};

SpOccupations sp_orbital_occupations(const StationaryPoint& sp, const Model& model);

// Classical Hamiltonian at sqrt(N) psi: N psi^+ D psi + (U/2) N^2 sum |psi_j|^4.
double classical_hamiltonian(const Model& model, const Eigen::VectorXcd& psi);
// Expectation of the exact quantum Hamiltonian in the N-particle coherent state over psi.
double coherent_state_energy(const Model& model, const Eigen::VectorXcd& psi);

// SP energy in the orbital-expansion convention (classical value minus the
// occupation-independent Delta*N offset); for an undisplaced chain SP this equals
// eps_o N - (U/4L) N^2.
double sp_energy(const StationaryPoint& sp, const Model& model);

}  // namespace bht
