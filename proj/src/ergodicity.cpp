#include "bhtomo/ergodicity.hpp"

#include <algorithm>
#include <cmath>

namespace bht {

MicrocanonicalWindow microcanonical_window(const EigenSet& eig, double center, double half_width) {
  const int n = static_cast<int>(eig.energies.size());
  if (n == 0) throw std::invalid_argument("microcanonical_window: empty spectrum");
  if (half_width <= 0.0)
    half_width = 0.02 * (eig.energies(n - 1) - eig.energies(0));
  MicrocanonicalWindow w;
  w.center = center;
  w.half_width = half_width;
  for (int i = 0; i < n; ++i)
    if (std::abs(eig.energies(i) - center) <= half_width) w.members.push_back(i);
  if (w.members.empty())
    throw NumericalError("microcanonical_window: no eigenstates within the window");
  w.low_statistics = w.members.size() < 10;
  return w;
}

Eigen::VectorXd microcanonical_distribution(const FockBlock& block, const EigenSet& eig,
                                            const MicrocanonicalWindow& window, int orbital_index,
                                            int particles) {
  Eigen::VectorXd pe = Eigen::VectorXd::Zero(particles + 1);
  for (int nu : window.members)
    pe += occupation_distribution(block, eig.vectors.col(nu), orbital_index, particles);
  return pe / static_cast<double>(window.members.size());
}

double sigma_measure(const FockBlock& block, const EigenSet& eig,
                     const MicrocanonicalWindow& window, int orbital_index, int particles) {
  const Eigen::VectorXd pe =
      microcanonical_distribution(block, eig, window, orbital_index, particles);
  double acc = 0.0;
  for (int nu : window.members) {
    const Eigen::VectorXd pn =
        occupation_distribution(block, eig.vectors.col(nu), orbital_index, particles);
    acc += (pn - pe).squaredNorm();
  }
  const double cells = static_cast<double>(window.members.size()) * (particles + 1);
  return std::sqrt(acc / cells);
}

Fingerprint max_condensate_fingerprint(const std::vector<TomoPoint>& points) {
  if (points.empty()) throw std::invalid_argument("max_condensate_fingerprint: no points");
  const TomoPoint* best = &points.front();
  for (const auto& p : points) {
    if (p.n_o_mean > best->n_o_mean + 1e-12 ||
        (std::abs(p.n_o_mean - best->n_o_mean) <= 1e-12 && p.energy < best->energy))
      best = &p;
  }
  return {best->n_o_mean, best->purity, best->nu, best->energy};
}

std::pair<double, double> quasiparticle_coefficients(const Model& model,
                                                     const StationaryPoint& sp,
                                                     const BogoSpectrum& spec, int dm) {
  const int mo = sp.mode;
  const int hi = model.index_of_mode(mo + dm);
  const bool has_mirror = (model.geometry() == Geometry::Ring)
                              ? true
                              : (mo - dm >= 1);
  const int pair = (model.geometry() == Geometry::Ring)
                       ? model.index_of_mode(((mo - dm) % model.sites() + model.sites()) % model.sites())
                       : (has_mirror ? model.index_of_mode(mo - dm) : hi);

  // W is built in the site basis; move the mode vector to orbitals.
  const Eigen::MatrixXcd& f = model.orbital_matrix();
  const BogoSpectrum::Mode* best = nullptr;
  double best_weight = -1.0;
  for (const auto& mode : spec.modes) {
    if (std::abs(mode.omega.imag()) > 1e-8 * std::max(1.0, std::abs(mode.omega))) continue;
    if (mode.symplectic_norm <= 0.0) continue;  // zero mode or negative-norm partner
    const Eigen::VectorXcd x = f.adjoint() * mode.x;
    const Eigen::VectorXcd y = f.transpose() * mode.y;
    const double weight = std::norm(x(hi)) + std::norm(y(pair));
    const double total = x.squaredNorm() + y.squaredNorm();
    if (weight / total > best_weight) {
      best_weight = weight / total;
      best = &mode;
    }
  }
  if (!best) throw NumericalError("quasiparticle_coefficients: no real positive-norm mode");

  Eigen::VectorXcd x = f.adjoint() * best->x;
  Eigen::VectorXcd y = f.transpose() * best->y;
  std::complex<double> u = x(hi);
  std::complex<double> v = y(pair);
  const std::complex<double> phase = std::polar(1.0, -std::arg(u));
  u *= phase;
  v *= phase;
  if (std::abs(v.imag()) > 1e-6 * std::max(1.0, std::abs(v)))
    throw NumericalError("quasiparticle_coefficients: pairing amplitude is not real");
  const double uu = u.real(), vv = v.real();
  const double s = uu * uu - vv * vv;
  if (s <= 0.0)
    throw NumericalError("quasiparticle_coefficients: mode has non-positive norm on the pair");
  const double c = 1.0 / std::sqrt(s);
  return {uu * c, vv * c};
}

namespace {

int block_of_state(const Model& model, const std::vector<FockBlock>& blocks, const FockState& s) {
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
    const BlockLabel& l = blocks[b].label();
    if (model.geometry() == Geometry::Ring) {
      if (l.momentum == ring_momentum(s, model.sites())) return b;
    } else {
      if (l.parity == chain_parity(s)) return b;
    }
  }
  throw NumericalError("apply_hop: no block for target state");
}

}  // namespace

SectorVector apply_hop(const Model& model, const std::vector<FockBlock>& blocks,
                       const SectorVector& v, int k_to, int k_from) {
  const FockBlock& src = blocks[v.block];
  int target_block = -1;
  Eigen::VectorXd out;
  FockState t;
  for (int a = 0; a < src.dimension(); ++a) {
    if (v.coeffs(a) == 0.0) continue;
    const FockState& s = src.states()[a];
    if (s[k_from] == 0) continue;
    t = s;
    t[k_from] -= 1;
    t[k_to] += 1;
    if (target_block < 0) {
      target_block = block_of_state(model, blocks, t);
      out = Eigen::VectorXd::Zero(blocks[target_block].dimension());
    }
    const int b = blocks[target_block].index_of(t);
    if (b < 0) throw NumericalError("apply_hop: target state missing from its block");
    out(b) += v.coeffs(a) * std::sqrt(static_cast<double>(s[k_from]) * t[k_to]);
  }
  if (target_block < 0) {
    // annihilated entirely; report the source block with a zero vector
    return {v.block, Eigen::VectorXd::Zero(src.dimension())};
  }
  return {target_block, out};
}

namespace {

SectorVector apply_quasiparticle(const Model& model, const std::vector<FockBlock>& blocks,
                                 const SectorVector& v, int mode_o,
                                 const QuasiparticleMode& mode) {
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(model.particles()));
  const int ko = model.index_of_mode(mode_o);
  const int hi = model.index_of_mode(mode_o + mode.dm);
  const bool has_mirror = (model.geometry() == Geometry::Ring) || (mode_o - mode.dm >= 1);
  const int pair =
      (model.geometry() == Geometry::Ring)
          ? model.index_of_mode(((mode_o - mode.dm) % model.sites() + model.sites()) %
                                model.sites())
          : (has_mirror ? model.index_of_mode(mode_o - mode.dm) : hi);

  // C+ = u A_q - v A+_{-q},  A_q = b+_{hi} b_{ko} / sqrt(N),  A+_{-q} = b+_{ko} b_{pair} / sqrt(N)
  SectorVector term1 = apply_hop(model, blocks, v, hi, ko);
  SectorVector term2 = apply_hop(model, blocks, v, ko, pair);
  if (term1.coeffs.squaredNorm() == 0.0 && term2.coeffs.squaredNorm() == 0.0)
    return {v.block, Eigen::VectorXd::Zero(blocks[v.block].dimension())};
  if (term1.coeffs.squaredNorm() == 0.0) term1 = {term2.block, Eigen::VectorXd::Zero(term2.coeffs.size())};
  if (term2.coeffs.squaredNorm() == 0.0) term2 = {term1.block, Eigen::VectorXd::Zero(term1.coeffs.size())};
  if (term1.block != term2.block)
    throw NumericalError("synthetic_excitations: quasiparticle terms land in different sectors");
  return {term1.block,
          (mode.u * inv_sqrt_n) * term1.coeffs - (mode.v * inv_sqrt_n) * term2.coeffs};
}

}  // namespace

std::vector<SyntheticState> synthetic_excitations(const Model& model,
                                                  const std::vector<FockBlock>& blocks,
                                                  const SectorVector& reference, int mode_o,
                                                  const std::vector<QuasiparticleMode>& modes,
                                                  int max_phonons) {
  std::vector<SyntheticState> out;
  std::vector<int> counts(modes.size(), 0);

  const auto emit = [&](auto&& self, std::size_t mode_idx, int total,
                        const SectorVector& state) -> void {
    if (mode_idx == modes.size() || total == max_phonons) {
      SyntheticState s;
      s.phonons = counts;
      s.total = total;
      const double nrm = state.coeffs.norm();
      s.norm_kept = nrm;
      s.state = state;
      if (nrm > 1e-10)
        s.state.coeffs /= nrm;
      out.push_back(std::move(s));
      return;
    }
    self(self, mode_idx + 1, total, state);
    SectorVector cur = state;
    for (int n = 1; total + n <= max_phonons; ++n) {
      cur = apply_quasiparticle(model, blocks, cur, mode_o, modes[mode_idx]);
      counts[mode_idx] = n;
      self(self, mode_idx + 1, total + n, cur);
      if (cur.coeffs.squaredNorm() == 0.0) break;
    }
    counts[mode_idx] = 0;
  };
  emit(emit, 0, 0, reference);

  // drop vanished states
  std::erase_if(out, [](const SyntheticState& s) { return s.norm_kept <= 1e-10; });

  // Gram-Schmidt within each (total, block) group, in emission order
  for (int total = 1; total <= max_phonons; ++total) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i].total != total) continue;
      for (std::size_t j = 0; j < i; ++j) {
        if (out[j].total != total || out[j].state.block != out[i].state.block) continue;
        out[i].state.coeffs -=
            out[j].state.coeffs.dot(out[i].state.coeffs) * out[j].state.coeffs;
      }
      const double nrm = out[i].state.coeffs.norm();
      if (nrm > 1e-8)
        out[i].state.coeffs /= nrm;
      else
        out[i].norm_kept = 0.0;  // linearly dependent: flagged for removal
    }
  }
  std::erase_if(out, [](const SyntheticState& s) { return s.norm_kept <= 1e-10; });
  return out;
}

PhononLabel classify_phonon_content(const SectorVector& eigenstate,
                                    const std::vector<SyntheticState>& synthetic) {
  double best_w = 0.0;
  int best_n = -1;
  for (const auto& s : synthetic) {
    if (s.state.block != eigenstate.block) continue;
    const double ov = s.state.coeffs.dot(eigenstate.coeffs);
    const double w = ov * ov;
    if (w > best_w) {
      best_w = w;
      best_n = s.total;
    }
  }
  if (best_w < 1e-3) return {-1, 0.0, true};
  return {best_n, best_w, false};
}

double rayleigh_energy(const std::vector<FockBlock>& blocks, const SectorVector& v) {
  const FockBlock& b = blocks[v.block];
  if (!b.has_hamiltonian()) throw std::invalid_argument("rayleigh_energy: H not built");
  return v.coeffs.dot(b.hamiltonian() * v.coeffs) / v.coeffs.squaredNorm();
}

}  // namespace bht
