#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <vector>

#include "bhtomo/model.hpp"
#include "bhtomo/stationary.hpp"

namespace bht {

enum class Scheme { SplitStep4, RK4 };

struct IntegratorOptions {
  double dt = 2e-3;
  Scheme scheme = Scheme::SplitStep4;
  double sample_interval = 0.1;   // spacing of stored n_k / monitor samples
  double burn_in_fraction = 0.1;  // excluded from time averages
  bool store_psi = false;
  bool enforce_monitors = true;   // abort when drifts exceed the tolerances
  double norm_tol = 1e-8;
  double energy_tol = 1e-8;       // relative, scale max(|E0|, N K)
};

struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd n_k_t;    // orbital occupations (N-scale), one column per sample
  Eigen::MatrixXcd psi_t;   // only if store_psi
  Eigen::VectorXcd psi_final;
  double norm_drift = 0.0;        // max |  |psi|^2 - 1 |
  double energy_drift_rel = 0.0;  // max |E - E0| / max(|E0|, N K)
  double energy0 = 0.0;

  // post-burn-in accumulators
  Eigen::VectorXd n_k_mean;   // time-averaged occupations (N-scale)
  Eigen::MatrixXcd rho_mean;  // time average of psi psi^dagger (site basis)
  int mean_samples = 0;
};

// i dpsi/dt = (D + N U |psi|^2) psi
Eigen::VectorXcd dnlse_rhs(const Model& model, const Eigen::VectorXcd& psi);

// Propagate for |t_final|; dt < 0 runs the dynamics backwards.
Trajectory integrate(const Model& model, const Eigen::VectorXcd& psi0, double t_final,
                     IntegratorOptions opts = {});

Eigen::VectorXd time_average_occupations(const Trajectory& traj, double t_burn);

// Tr rho^2 of the trace-normalized time-averaged one-body matrix.
double classical_purity(const Trajectory& traj);

// Post-burn histogram of the inspected occupation over N+1 integer-centered bins.
Eigen::VectorXd occupation_histogram(const Trajectory& traj, int orbital_index, int particles,
                                     double t_burn);

struct LyapunovResult {
  double gamma = 0.0;
  double plateau_std = 0.0;
  bool plateaued = false;
};

// Two-trajectory estimate with periodic renormalization of the separation.
LyapunovResult lyapunov_exponent(const Model& model, const Eigen::VectorXcd& psi0, double t_final,
                                 double renorm_interval = 1.0, double d0 = 1e-8,
                                 std::uint64_t seed = 1, IntegratorOptions opts = {});

struct PhaseSpaceSample {
  Eigen::VectorXcd psi;
  double energy;
};

// Rejection sampling: occupations uniform on the simplex, phases uniform,
// kept when |H_cl - E| < window. Deterministic under the seed.
std::vector<PhaseSpaceSample> sample_energy_shell(const Model& model, double energy, double window,
                                                  int count, std::uint64_t seed);

// Launch-state protocol: the inspected orbital gets n_o, the remainder is spread
// over the other orbitals proportionally to the SP's residual orbital profile
// (uniformly when that profile vanishes), with random phases.
Eigen::VectorXcd protocol_state(const Model& model, const StationaryPoint& sp, double n_o_frac,
                                std::mt19937_64& rng);

struct ErgodicityPoint {
  double n_o_init_frac;
  double n_o_mean_frac;  // averaged over seeds
};

std::vector<ErgodicityPoint> ergodicity_map(const Model& model, const StationaryPoint& sp,
                                            const std::vector<double>& n_o_grid, double t_final,
                                            int seeds = 8, std::uint64_t master_seed = 1,
                                            IntegratorOptions opts = {});

struct ClassicalTomoPoint {
  double energy;
  double n_o_mean;
  double purity;
};

std::vector<ClassicalTomoPoint> classical_tomography(const Model& model,
                                                     const std::vector<PhaseSpaceSample>& samples,
                                                     int mode_o, double t_final,
                                                     IntegratorOptions opts = {});

}  // namespace bht
