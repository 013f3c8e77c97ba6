#include <doctest.h>

#include <cmath>

#include "bhtomo/dynamics.hpp"
#include "bhtomo/ergodicity.hpp"

using namespace bht;
using cd = std::complex<double>;

TEST_SUITE_BEGIN("ergodicity");

namespace {

struct Built {
  Model model;
  std::vector<FockBlock> blocks;
  std::vector<EigenSet> eigs;
};

Built build_all(Model m, std::size_t cap = kDefaultBlockCap) {
  const auto basis = FockBasis::enumerate(m);
  auto blocks = symmetry_blocks(m, basis);
  std::vector<EigenSet> eigs;
  for (auto& b : blocks) {
    build_hamiltonian(m, b, cap);
    eigs.push_back(diagonalize(b));
  }
  return {std::move(m), std::move(blocks), std::move(eigs)};
}

}  // namespace

TEST_CASE("microcanonical window basics") {
  const Built d = build_all(Model::from_u(Geometry::Chain, 4, 6, 1.4));
  const auto& e = d.eigs[0];

  // single-state window reproduces that state's distribution
  const double center = e.energies(3);
  const auto w1 = microcanonical_window(e, center, 1e-9);
  REQUIRE(w1.members.size() == 1);
  CHECK(w1.low_statistics);
  const int ko = d.model.index_of_mode(2);
  const Eigen::VectorXd pe = microcanonical_distribution(d.blocks[0], e, w1, ko, 6);
  const Eigen::VectorXd pn = occupation_distribution(d.blocks[0], e.vectors.col(3), ko, 6);
  CHECK((pe - pn).cwiseAbs().maxCoeff() < 1e-14);

  // default width covers 2 percent of the span; distribution is normalized
  const auto w2 = microcanonical_window(e, center);
  CHECK(w2.half_width == doctest::Approx(0.02 * (e.energies(e.energies.size() - 1) -
                                                 e.energies(0))));
  const Eigen::VectorXd p2 = microcanonical_distribution(d.blocks[0], e, w2, ko, 6);
  CHECK(p2.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p2.minCoeff() >= 0.0);

  CHECK_THROWS_AS(microcanonical_window(e, e.energies(0) - 100.0, 0.1), NumericalError);
}

TEST_CASE("sigma vanishes iff member distributions coincide") {
  const Built d = build_all(Model::from_u(Geometry::Chain, 4, 6, 0.0));
  const auto& e = d.eigs[0];
  const int ko = d.model.index_of_mode(1);
  const auto w = microcanonical_window(e, e.energies(2), 1e-9);
  CHECK(sigma_measure(d.blocks[0], e, w, ko, 6) == doctest::Approx(0.0));

  const Built di = build_all(Model::from_u(Geometry::Chain, 4, 6, 2.0));
  const auto& ei = di.eigs[0];
  const auto wi = microcanonical_window(ei, 0.5 * (ei.energies(0) + ei.energies(ei.energies.size() - 1)));
  CHECK(sigma_measure(di.blocks[0], ei, wi, ko, 6) > 0.0);
}

TEST_CASE("sigma is invariant under member reordering") {
  const Built d = build_all(Model::from_u(Geometry::Chain, 4, 6, 2.0));
  const auto& e = d.eigs[0];
  const int ko = d.model.index_of_mode(2);
  auto w = microcanonical_window(e, 0.0, 3.0);
  const double s1 = sigma_measure(d.blocks[0], e, w, ko, 6);
  std::reverse(w.members.begin(), w.members.end());
  const double s2 = sigma_measure(d.blocks[0], e, w, ko, 6);
  CHECK(s1 == doctest::Approx(s2).epsilon(1e-14));
}

TEST_CASE("fingerprint extraction and tie-breaking") {
  std::vector<TomoPoint> pts;
  pts.push_back({"even", 0, -3.0, 4.0, 0.7, 1.0 / 0.7});
  pts.push_back({"even", 1, -1.0, 6.0, 0.9, 1.0 / 0.9});
  pts.push_back({"even", 2, 2.0, 6.0, 0.8, 1.0 / 0.8});  // tie on n_o, higher energy
  const Fingerprint f = max_condensate_fingerprint(pts);
  CHECK(f.nu == 1);
  CHECK(f.n_max == 6.0);
  CHECK(f.s_max == doctest::Approx(0.9));

  // u = 0: condensate eigenstate gives (N, 1)
  const Built d = build_all(Model::from_u(Geometry::Chain, 4, 5, 0.0));
  std::vector<std::pair<const FockBlock*, const EigenSet*>> sectors;
  for (std::size_t i = 0; i < d.blocks.size(); ++i)
    sectors.push_back({&d.blocks[i], &d.eigs[i]});
  const auto points = tomographic_spectrum(d.model, sectors, 2);
  const Fingerprint f0 = max_condensate_fingerprint(points);
  CHECK(f0.n_max == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(f0.s_max == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("quasiparticle coefficients") {
  // u = 0: no pairing
  const Model free_m = Model::from_u(Geometry::Chain, 5, 20, 0.0);
  const StationaryPoint sp0 = continue_sp(free_m, 1);
  const BogoSpectrum spec0 = bogoliubov_spectrum(free_m, sp0);
  for (int dm : {1, 2, 3, 4}) {
    const auto [u, v] = quasiparticle_coefficients(free_m, sp0, spec0, dm);
    CHECK(u == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(v) < 1e-9);
  }

  // ring: analytic 2x2 oracle per q block of the zero-order pair Hamiltonian
  const double u_int = 2.0;
  const Model ring = Model::from_u(Geometry::Ring, 5, 20, u_int, 0.0);
  const StationaryPoint rsp = continue_sp(ring, 0);
  const BogoSpectrum rspec = bogoliubov_spectrum(ring, rsp);
  const double delta = ring.delta();
  for (int dm : {1, 2}) {
    const double q = 2.0 * kPi * dm / 5.0;
    const double eps_par = 2.0 * std::cos(0.0) * std::pow(std::sin(q / 2.0), 2.0);
    // mode equations: omega x = (eps_par + delta) x + delta y; -omega y = delta x + (eps_par + delta) y
    const double omega = std::sqrt(eps_par * (eps_par + 2.0 * delta));
    const double diag = eps_par + delta;
    const double ue = std::sqrt((diag / omega + 1.0) / 2.0);
    const double ve = -std::copysign(std::sqrt((diag / omega - 1.0) / 2.0), delta);
    const auto [uq, vq] = quasiparticle_coefficients(ring, rsp, rspec, dm);
    CHECK(uq == doctest::Approx(ue).epsilon(1e-9));
    CHECK(vq == doctest::Approx(ve).epsilon(1e-9));
    CHECK(uq * uq - vq * vq == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("hop application preserves sectors and amplitudes") {
  const Built d = build_all(Model::from_u(Geometry::Chain, 4, 4, 1.0));
  // start from the condensate-in-mode-1 basis state in the even block
  const int even = d.blocks[0].label().parity > 0 ? 0 : 1;
  const int ko = d.model.index_of_mode(1);
  int a0 = -1;
  for (int a = 0; a < d.blocks[even].dimension(); ++a)
    if (d.blocks[even].states()[a][ko] == 4) a0 = a;
  REQUIRE(a0 >= 0);
  SectorVector v{even, Eigen::VectorXd::Zero(d.blocks[even].dimension())};
  v.coeffs(a0) = 1.0;

  const int k2 = d.model.index_of_mode(2);  // odd reflection sign: parity flips
  const SectorVector w = apply_hop(d.model, d.blocks, v, k2, ko);
  CHECK(w.block != even);
  CHECK(w.coeffs.norm() == doctest::Approx(std::sqrt(4.0)).epsilon(1e-12));

  const int k3 = d.model.index_of_mode(3);  // even sign: parity preserved
  const SectorVector w2 = apply_hop(d.model, d.blocks, v, k3, ko);
  CHECK(w2.block == even);
}

TEST_CASE("synthetic excitations at u = 0 are exact eigenstates") {
  const Built d = build_all(Model::from_u(Geometry::Chain, 5, 8, 0.0));
  const int even = 0;
  const int ko = d.model.index_of_mode(1);
  // reference: ground state (condensate in the bottom orbital)
  const Eigen::VectorXd gs = d.eigs[even].vectors.col(0);
  SectorVector ref{even, gs};

  std::vector<QuasiparticleMode> modes;
  const StationaryPoint sp = continue_sp(d.model, 1);
  const BogoSpectrum spec = bogoliubov_spectrum(d.model, sp);
  for (int dm = 1; dm <= 4; ++dm) {
    const auto [u, v] = quasiparticle_coefficients(d.model, sp, spec, dm);
    const double eo = d.model.orbital(ko).energy;
    modes.push_back({dm, u, v,
                     d.model.orbital(d.model.index_of_mode(1 + dm)).energy - eo});
  }
  const auto synth = synthetic_excitations(d.model, d.blocks, ref, 1, modes, 3);

  // zero phonons reproduces the reference
  bool found_ref = false;
  for (const auto& s : synth)
    if (s.total == 0) {
      CHECK(std::abs(std::abs(s.state.coeffs.dot(gs)) - 1.0) < 1e-12);
      found_ref = true;
    }
  CHECK(found_ref);

  // one-phonon states are exact u = 0 eigenstates: H s = E s
  for (const auto& s : synth) {
    if (s.total != 1) continue;
    const auto& block = d.blocks[s.state.block];
    const Eigen::VectorXd hv = block.hamiltonian() * s.state.coeffs;
    const double e = s.state.coeffs.dot(hv);
    CHECK((hv - e * s.state.coeffs).norm() < 1e-10);
  }

  // orthonormality within sectors: column norms of the overlap matrix stay <= 1
  for (const auto& s : synth) {
    CHECK(std::abs(s.state.coeffs.norm() - 1.0) < 1e-9);
    for (const auto& t : synth) {
      if (&s == &t || s.total != t.total || s.state.block != t.state.block) continue;
      CHECK(std::abs(s.state.coeffs.dot(t.state.coeffs)) < 1e-9);
    }
  }
}

TEST_CASE("phonon classification at u = 0 is exact") {
  const Built d = build_all(Model::from_u(Geometry::Chain, 5, 8, 0.0));
  const int even = 0;
  const Eigen::VectorXd gs = d.eigs[even].vectors.col(0);
  SectorVector ref{even, gs};

  const StationaryPoint sp = continue_sp(d.model, 1);
  const BogoSpectrum spec = bogoliubov_spectrum(d.model, sp);
  std::vector<QuasiparticleMode> modes;
  for (int dm = 1; dm <= 4; ++dm) {
    const auto [u, v] = quasiparticle_coefficients(d.model, sp, spec, dm);
    modes.push_back({dm, u, v, 0.0});
  }
  const auto synth = synthetic_excitations(d.model, d.blocks, ref, 1, modes, 2);

  // ground state: zero phonons, weight one
  const PhononLabel gl = classify_phonon_content(ref, synth);
  CHECK(gl.n_phonons == 0);
  CHECK(gl.weight == doctest::Approx(1.0).epsilon(1e-10));

  // every one-phonon eigenstate (one particle moved from the condensate) is labeled 1
  for (int bi = 0; bi < 2; ++bi) {
    const auto& block = d.blocks[bi];
    for (int a = 0; a < block.dimension(); ++a) {
      const auto& s = block.states()[a];
      if (s[d.model.index_of_mode(1)] != 7) continue;
      SectorVector state{bi, Eigen::VectorXd::Zero(block.dimension())};
      state.coeffs(a) = 1.0;
      const PhononLabel l = classify_phonon_content(state, synth);
      CHECK(l.n_phonons == 1);
      CHECK(l.weight == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  // far-away states carry no overlap: flagged multi
  for (int bi = 0; bi < 2; ++bi) {
    const auto& block = d.blocks[bi];
    for (int a = 0; a < block.dimension(); ++a) {
      if (block.states()[a][d.model.index_of_mode(1)] != 0) continue;
      SectorVector state{bi, Eigen::VectorXd::Zero(block.dimension())};
      state.coeffs(a) = 1.0;
      const PhononLabel l = classify_phonon_content(state, synth);
      CHECK(l.multi);
      break;
    }
  }
}

TEST_CASE("quantum-classical microcanonical agreement (compact instance)") {
  // scaled-down version of the desk benchmark: 3-site chain, strong interaction
  const int n_part = 40;
  const double u = 3.5;
  const Model m = Model::from_u(Geometry::Chain, 3, n_part, u);
  const Built d = build_all(m);
  const int even = 0;
  const int ko = m.index_of_mode(2);

  const StationaryPoint sp = continue_sp(m, 2);
  const double e_sp_q = coherent_state_energy(m, sp.psi);
  const auto w = microcanonical_window(d.eigs[even], e_sp_q);
  const Eigen::VectorXd pe =
      microcanonical_distribution(d.blocks[even], d.eigs[even], w, ko, n_part);

  // launch in the chaotic sea at the same energy (skip draws inside the SP island)
  const double e_cl = classical_hamiltonian(m, sp.psi);
  const auto samples = sample_energy_shell(m, e_cl, 0.02 * n_part, 24, 1000);
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(n_part + 1);
  IntegratorOptions opts;
  int used = 0;
  for (const auto& s : samples) {
    const double n0 = n_part * (m.orbital_matrix().adjoint() * s.psi).cwiseAbs2()(ko);
    if (n0 / n_part > 0.7) continue;
    const Trajectory traj = integrate(m, s.psi, 2500.0, opts);
    hist += occupation_histogram(traj, ko, n_part, 250.0);
    if (++used == 4) break;
  }
  REQUIRE(used == 4);
  hist /= used;
  CHECK((hist - pe).cwiseAbs().maxCoeff() < 0.05);
}

TEST_SUITE_END();
