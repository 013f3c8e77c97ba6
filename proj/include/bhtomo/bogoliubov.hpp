#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "bhtomo/model.hpp"
#include "bhtomo/stationary.hpp"

namespace bht {

enum class StabilityClass { ES, DS, Unstable };
std::string to_string(StabilityClass c);

struct BogoSpectrum {
  // One entry per +- pair: the zero mode plus L_s - 1 physical frequencies.
  // Real modes carry the sign of the positive-symplectic-norm member; complex
  // modes are reported with Im > 0.
  std::vector<std::complex<double>> physical;
  Eigen::VectorXcd eigenvalues;  // all 2 L_s values of W (zero pair snapped)
  StabilityClass classification;
  double gamma_o;  // max Im over the spectrum

  // Eigenvector halves of each nonzero physical mode in the equation-of-motion
  // convention (i d/dt (db, db~) = M (db, db~)), same basis as W was built in.
  struct Mode {
    std::complex<double> omega;
    Eigen::VectorXcd x, y;
    double symplectic_norm;  // (|x|^2 - |y|^2) / (|x|^2 + |y|^2)
  };
  std::vector<Mode> modes;  // sorted like physical[1..]
};

// Paper-form Bogoliubov matrix [[A, -B], [B, -A]] with A = D + 2 NU P - mu, B = NU P.
// Requires a real SP wavefunction (chain, or non-rotating ring).
Eigen::MatrixXd build_W(const Model& model, const StationaryPoint& sp);
// General form [[A, -B], [conj(B), -conj(A)]] with B = NU diag(psi_j^2); valid for
// complex SPs (rotating ring). Coincides with build_W for real psi.
Eigen::MatrixXcd build_W_general(const Model& model, const StationaryPoint& sp);

// Eigen-analysis of a Bogoliubov matrix: pairing, sign bookkeeping, classification.
BogoSpectrum frequencies(const Eigen::MatrixXcd& w);
BogoSpectrum frequencies(const Eigen::MatrixXd& w);

// Convenience: build_W_general + frequencies, with the exact conservation-law null
// vector verified against W before the zero pair is snapped.
BogoSpectrum bogoliubov_spectrum(const Model& model, const StationaryPoint& sp);

// omega_q = eps_perp + sqrt((eps_par + 2 Delta) eps_par) at unfolded phase
// phi = Phi - 2 pi m_o, with q = 2 pi dm / L, dm = 1..L-1.
std::complex<double> ring_frequency_closed_form(const Model& model, int mode_o, int dm);
std::vector<std::complex<double>> ring_frequencies_closed_form(const Model& model, int mode_o);

// Zero-order chain frequency for pair transfer into orbital k: sign(eps_par) *
// sqrt((eps_par + 2 Delta) eps_par), complex when the radicand is negative.
std::complex<double> chain_zero_order_frequency(const Model& model, int mode_o, int mode_k);
// Interaction u at which the zero-order radicand for mode_k crosses zero (the
// analytic complexity onset), or nullopt if that mode never turns complex.
std::optional<double> chain_zero_order_onset(const Model& model, int mode_o, int mode_k);

// Closed forms for the L_s = 5 chain, m_o = 2 SP (cubic in omega^2) and the
// m_o = 3 dark state. Frequencies are signed like the physical convention.
struct FiveSiteChainFrequencies {
  std::complex<double> lambda_m1, lambda_p1, lambda_3;  // cubic roots (omega^2)
  std::complex<double> omega_m1, omega_p1, omega_2, omega_3;
  double discriminant;  // Delta_1^2 - 4 Delta_0^3, positive above u_c
};
FiveSiteChainFrequencies five_site_chain_closed_form(double u);
double five_site_chain_critical_u();  // discriminant root near 1.307

struct DarkStateFrequencies {
  std::complex<double> m1, p1, m2, p2;
};
DarkStateFrequencies dark_state_frequencies(double u);

// P in the orbital representation, F^dagger diag(p) F (real for both geometries).
Eigen::MatrixXd build_P_tilde(const Model& model, const StationaryPoint& sp);

// Block-diagonal approximation of W: 2x2 blocks for orbitals with no mirror
// partner below 2 k_o (high modes) and 4x4 blocks for k_o +- q pairs (low modes).
struct BlockApproxResult {
  double delta_o;
  Eigen::VectorXd delta_k;  // per orbital
  struct HighMode {
    int mode;                    // orbital label
    std::complex<double> omega;  // sign(E_k) sqrt(E_k^2 - Delta_k^2)
  };
  struct LowPair {
    int dm;
    double delta_q;
    std::array<std::complex<double>, 2> omegas;  // |small|, |large| roots of the bi-quadratic
  };
  std::vector<HighMode> high;
  std::vector<LowPair> low;
};
BlockApproxResult block_approximation(const Model& model, const StationaryPoint& sp);

struct StabilityDiagram {
  std::vector<double> phi_grid;
  std::vector<double> u_grid;
  std::vector<StabilityClass> cells;  // cells[iu * phi_grid.size() + iphi]
  std::vector<double> phi_c_es;       // per u: ES -> DS boundary (NaN if absent)
  std::vector<double> phi_c_inst;     // per u: first Unstable phi (NaN if absent)
  StabilityClass at(std::size_t iu, std::size_t iphi) const {
    return cells[iu * phi_grid.size() + iphi];
  }
};

// Ring (phi, u) regime diagram via the closed form; boundary curves by bisection.
StabilityDiagram ring_stability_diagram(const Model& base, int mode_o,
                                        const std::vector<double>& phi_grid,
                                        const std::vector<double>& u_grid);

// Solution of the generalized Landau-criterion equation
// 2 cos(phi/L) = -(u/L) + sqrt((u/L)^2 + 4 cos^2(q/2)) at q = 2 pi / L.
double ring_phi_c_es_implicit(const Model& base, double u);

struct CriticalU {
  double value;  // onset, or the scan cap when not found
  bool found;
};
// Smallest u with an Unstable classification (exact W along the continued SP),
// bisected to tol. u_c = 0 is reported when the onset collapses to the origin.
CriticalU critical_u(const Model& base, int mode_o, double u_cap = 20.0, double tol = 1e-4);

struct FrequencyScanRow {
  double u;
  std::vector<std::complex<double>> physical;  // ascending by real part
};
// Physical frequencies along the continued SP over an ascending u grid.
std::vector<FrequencyScanRow> frequency_scan(const Model& base, int mode_o,
                                             const std::vector<double>& u_values);

}  // namespace bht
