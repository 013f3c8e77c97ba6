#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bhtomo/bogoliubov.hpp"
#include "bhtomo/fock.hpp"
#include "bhtomo/tomography.hpp"

namespace bht {

struct MicrocanonicalWindow {
  double center;
  double half_width;
  std::vector<int> members;  // eigenstate indices within the set
  bool low_statistics;       // fewer than 10 members
};

// half_width <= 0 selects the default 2% of the block's spectral span.
MicrocanonicalWindow microcanonical_window(const EigenSet& eig, double center,
                                           double half_width = 0.0);

// Average of P^nu(n_o) over the window members.
Eigen::VectorXd microcanonical_distribution(const FockBlock& block, const EigenSet& eig,
                                            const MicrocanonicalWindow& window, int orbital_index,
                                            int particles);

// RMS of P^nu - P^E over (nu in window, n_o in 0..N).
double sigma_measure(const FockBlock& block, const EigenSet& eig,
                     const MicrocanonicalWindow& window, int orbital_index, int particles);

struct Fingerprint {
  double n_max;
  double s_max;
  int nu;
  double energy;
};

// The eigenstate maximizing <n_o>; ties broken toward lower energy.
Fingerprint max_condensate_fingerprint(const std::vector<TomoPoint>& points);

// Real (u_q, v_q) of a Bogoliubov mode, normalized to u^2 - v^2 = 1, read off the
// mode's eigenvector components on the k_o + dm orbital (x) and its pairing
// partner (y): k_o - dm when that orbital exists, k_o + dm itself otherwise.
std::pair<double, double> quasiparticle_coefficients(const Model& model,
                                                     const StationaryPoint& sp,
                                                     const BogoSpectrum& spec, int dm);

// A block-tagged vector in the many-body basis.
struct SectorVector {
  int block;
  Eigen::VectorXd coeffs;
};

// Apply b+_{k_to} b_{k_from} (no 1/sqrt(N)); returns the image with its block.
SectorVector apply_hop(const Model& model, const std::vector<FockBlock>& blocks,
                       const SectorVector& v, int k_to, int k_from);

struct SyntheticState {
  std::vector<int> phonons;  // per mode, aligned with the mode list handed in
  int total;
  SectorVector state;        // normalized
  double norm_kept;          // norm before normalization (0 => dropped)
};

struct QuasiparticleMode {
  int dm;
  double u, v;
  std::complex<double> omega;
};

// All multi-phonon states C+^nu |ref> with total phonons <= max_phonons,
// Gram-Schmidt orthonormalized within each (total, block) group.
std::vector<SyntheticState> synthetic_excitations(const Model& model,
                                                  const std::vector<FockBlock>& blocks,
                                                  const SectorVector& reference, int mode_o,
                                                  const std::vector<QuasiparticleMode>& modes,
                                                  int max_phonons = 3);

struct PhononLabel {
  int n_phonons;  // -1 encodes "multi"
  double weight;
  bool multi;
};

PhononLabel classify_phonon_content(const SectorVector& eigenstate,
                                    const std::vector<SyntheticState>& synthetic);

// <s|H|s> of a normalized sector vector.
double rayleigh_energy(const std::vector<FockBlock>& blocks, const SectorVector& v);

}  // namespace bht
