#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <vector>

#include "bhtomo/common.hpp"

namespace bht {

enum class Geometry { Ring, Chain };

// Single-particle stationary state: momentum orbital on a ring, sine mode in a chain.
struct Orbital {
  int m;                   // mode number: ring 0..L_s-1, chain 1..L_s
  double k;                // wavenumber (lattice constant = 1)
  double energy;           // eps_k
  Eigen::VectorXcd coeff;  // <x_j|k> over sites j = 1..L_s (real for chains)
};

struct DimensionlessParams {
  double u;         // N U / K
  double u_global;  // u_L = L u
  double delta;     // N U / L
  double gpe;       // delta / E_k(m_o); inf when E_k = 0
  double dnlse;     // delta / K = u_L / L^2
};

// Combinatorial coefficients C[k4,k3,k2,k1] of the orbital-basis interaction,
//   H_int = (U/2L) sum C[k4,k3,k2,k1] b+_{k4} b+_{k3} b_{k2} b_{k1},
// computed by direct site summation C = L * sum_j conj(f_{k4} f_{k3}) f_{k2} f_{k1}.
// Indices are 0-based orbital indices. Entries below 1e-12 are dropped as exact zeros.
class InteractionTensor {
public:
  struct Entry {
    int k4, k3, k2, k1;
    double c;
  };

  InteractionTensor(const Eigen::MatrixXcd& orbital_matrix, int length);

  const std::vector<Entry>& entries() const { return entries_; }
  double value(int k4, int k3, int k2, int k1) const;
  int orbital_count() const { return n_; }

private:
  int n_;
  std::vector<Entry> entries_;  // sorted by flat key
};

class Model {
public:
  // Factory with full validation. Chain requires phi == 0.
  static Model build(Geometry geometry, int sites, int particles, double hopping,
                     double interaction, double phi);
  // Convenience: fixes U from the requested dimensionless u = N U / K.
  static Model from_u(Geometry geometry, int sites, int particles, double u, double phi = 0.0,
                      double hopping = 1.0);

  Geometry geometry() const { return geometry_; }
  int sites() const { return sites_; }          // L_s
  int length() const { return length_; }        // L: ring L_s, chain L_s + 1
  int orbital_count() const { return sites_; }  // one orbital per site either way
  int particles() const { return particles_; }  // N
  double hopping() const { return hopping_; }   // K
  double interaction() const { return interaction_; }  // U
  double phi() const { return phi_; }                  // Sagnac phase (ring)

  double u() const { return particles_ * interaction_ / hopping_; }
  double u_global() const { return length_ * u(); }
  double delta() const { return particles_ * interaction_ / length_; }
  double floor_energy() const { return -hopping_; }

  const std::vector<Orbital>& orbitals() const { return orbitals_; }
  const Orbital& orbital(int index) const { return orbitals_.at(index); }
  // eps_k - eps_floor >= 0
  double kinetic_energy(int index) const { return orbitals_.at(index).energy + hopping_; }

  // Paper mode labels: ring m in 0..L_s-1 (momentum 2*pi*m/L), chain m in 1..L_s.
  int index_of_mode(int m) const;
  int mode_of_index(int index) const { return orbitals_.at(index).m; }

  // L_s x L_s unitary, column per orbital: F(j, idx) = <x_j | k_idx>.
  const Eigen::MatrixXcd& orbital_matrix() const { return orbital_matrix_; }
  bool orbitals_real() const { return geometry_ == Geometry::Chain; }

  // Single-particle hopping matrix D in the site basis (eq. of motion i dpsi/dt = (D + NU P) psi).
  const Eigen::MatrixXcd& hopping_matrix() const { return hopping_matrix_; }

  DimensionlessParams dimensionless_params(int mode_o) const;

  // Lazily built, cached; thread-safe after first access from a single thread.
  const InteractionTensor& interaction_tensor() const;

private:
  Model() = default;
  void init_orbitals();

  Geometry geometry_{};
  int sites_ = 0;
  int length_ = 0;
  int particles_ = 0;
  double hopping_ = 1.0;
  double interaction_ = 0.0;
  double phi_ = 0.0;

  std::vector<Orbital> orbitals_;
  Eigen::MatrixXcd orbital_matrix_;
  Eigen::MatrixXcd hopping_matrix_;
  mutable std::shared_ptr<const InteractionTensor> tensor_;
};

}  // namespace bht
