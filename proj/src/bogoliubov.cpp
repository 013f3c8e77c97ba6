#include "bhtomo/bogoliubov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bhtomo/linalg.hpp"

namespace bht {

namespace {
using cd = std::complex<double>;

constexpr double kComplexTol = 1e-8;  // |Im w| > tol * max(1, |w|) means complex
constexpr double kZeroSnapTol = 1e-6;

bool is_complex_mode(const cd& w) { return std::abs(w.imag()) > kComplexTol * std::max(1.0, std::abs(w)); }

bool lex_less(const cd& a, const cd& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

std::string to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::ES: return "ES";
    case StabilityClass::DS: return "DS";
    default: return "Unstable";
  }
}

Eigen::MatrixXd build_W(const Model& model, const StationaryPoint& sp) {
  if (sp.residual > 1e-10)
    throw std::invalid_argument("build_W: stationary point not converged");
  if (std::abs(model.u() - sp.u) > 1e-9 * std::max(1.0, sp.u))
    throw std::invalid_argument("build_W: model interaction does not match the SP");
  const Eigen::VectorXd psi = sp.psi_real();
  const Eigen::MatrixXd d = model.hopping_matrix().real();
  const int n = static_cast<int>(psi.size());
  const double g = sp.u * model.hopping();
  const Eigen::VectorXd p = psi.cwiseProduct(psi);

  Eigen::MatrixXd a = d;
  a.diagonal() += 2.0 * g * p;
  a.diagonal().array() -= sp.mu;
  Eigen::MatrixXd w(2 * n, 2 * n);
  w.topLeftCorner(n, n) = a;
  w.bottomRightCorner(n, n) = -a;
  w.topRightCorner(n, n) = Eigen::MatrixXd::Zero(n, n);
  w.topRightCorner(n, n).diagonal() = -g * p;
  w.bottomLeftCorner(n, n) = Eigen::MatrixXd::Zero(n, n);
  w.bottomLeftCorner(n, n).diagonal() = g * p;
  return w;
}

Eigen::MatrixXcd build_W_general(const Model& model, const StationaryPoint& sp) {
  if (sp.residual > 1e-10)
    throw std::invalid_argument("build_W: stationary point not converged");
  if (std::abs(model.u() - sp.u) > 1e-9 * std::max(1.0, sp.u))
    throw std::invalid_argument("build_W: model interaction does not match the SP");
  const int n = static_cast<int>(sp.psi.size());
  const double g = sp.u * model.hopping();
  const Eigen::VectorXd p = sp.psi.cwiseAbs2();
  const Eigen::VectorXcd b = g * sp.psi.cwiseProduct(sp.psi);

  Eigen::MatrixXcd a = model.hopping_matrix();
  a.diagonal().array() += 2.0 * g * p.array() - sp.mu;
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  w.topLeftCorner(n, n) = a;
  w.bottomRightCorner(n, n) = -a.conjugate();
  w.topRightCorner(n, n).diagonal() = -b;
  w.bottomLeftCorner(n, n).diagonal() = b.conjugate();
  return w;
}

namespace {

BogoSpectrum analyze(const Eigen::MatrixXcd& w) {
  const int two_n = static_cast<int>(w.rows());
  const int n = two_n / 2;
  GenEig ge = eig_general(w);
  Eigen::VectorXcd vals = ge.values;
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());

  std::vector<int> order(two_n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&vals](int a, int b) { return std::abs(vals(a)) < std::abs(vals(b)); });

  // Particle conservation forces a defective zero pair; snap it to exactly 0.
  if (std::abs(vals(order[0])) > kZeroSnapTol * scale ||
      std::abs(vals(order[1])) > kZeroSnapTol * scale)
    throw NumericalError("frequencies: conservation zero mode not found");
  if (two_n > 2 && std::abs(vals(order[2])) < kZeroSnapTol * scale)
    throw NumericalError("frequencies: numerical degeneracy at zero (defective pairing)");
  vals(order[0]) = 0.0;
  vals(order[1]) = 0.0;

  BogoSpectrum out;
  out.physical.push_back(0.0);

  std::vector<bool> used(two_n, false);
  used[order[0]] = used[order[1]] = true;

  double max_im = 0.0;
  for (int i = 0; i < two_n; ++i) max_im = std::max(max_im, std::abs(vals(i).imag()));

  bool any_complex = false;
  bool any_negative = false;
  for (int oi = two_n - 1; oi >= 0; --oi) {
    const int i = order[oi];
    if (used[i]) continue;
    used[i] = true;
    // partner: unused eigenvalue closest to -vals(i)
    int best = -1;
    double best_d = std::numeric_limits<double>::max();
    for (int j = 0; j < two_n; ++j) {
      if (used[j]) continue;
      const double dist = std::abs(vals(j) + vals(i));
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    if (best < 0 || best_d > 1e-6 * scale)
      throw NumericalError("frequencies: +-omega pairing failed (defective spectrum)");
    used[best] = true;

    const auto norm_of = [&](int col) {
      const double xs = ge.vectors.col(col).head(n).squaredNorm();
      const double ys = ge.vectors.col(col).tail(n).squaredNorm();
      return (xs - ys) / (xs + ys);
    };

    const cd wi = vals(i);
    cd physical;
    int chosen;
    if (is_complex_mode(wi)) {
      any_complex = true;
      chosen = (wi.imag() > 0.0) ? i : best;
      physical = vals(chosen);
      if (physical.imag() < 0.0) physical = std::conj(physical);  // degenerate guard
    } else {
      const double si = norm_of(i), sb = norm_of(best);
      if (std::max(si, sb) < 1e-3) {
        chosen = (wi.real() >= 0.0) ? i : best;  // crossing of a +- pair
      } else {
        chosen = (si > sb) ? i : best;
      }
      physical = cd(vals(chosen).real(), 0.0);
      if (physical.real() < 0.0) any_negative = true;
    }
    BogoSpectrum::Mode mode;
    mode.omega = physical;
    mode.x = ge.vectors.col(chosen).head(n);
    mode.y = -ge.vectors.col(chosen).tail(n);  // W is the sign-flipped EOM form
    mode.symplectic_norm = norm_of(chosen);
    out.modes.push_back(std::move(mode));
    out.physical.push_back(physical);
  }

  std::sort(out.modes.begin(), out.modes.end(),
            [](const BogoSpectrum::Mode& a, const BogoSpectrum::Mode& b) {
              return lex_less(a.omega, b.omega);
            });
  std::sort(out.physical.begin(), out.physical.end(), lex_less);
  out.eigenvalues = vals;
  out.gamma_o = max_im;
  out.classification = any_complex  ? StabilityClass::Unstable
                       : any_negative ? StabilityClass::DS
                                      : StabilityClass::ES;
  return out;
}

}  // namespace

BogoSpectrum frequencies(const Eigen::MatrixXcd& w) { return analyze(w); }
BogoSpectrum frequencies(const Eigen::MatrixXd& w) {
  return analyze(Eigen::MatrixXcd(w.cast<cd>()));
}

BogoSpectrum bogoliubov_spectrum(const Model& model, const StationaryPoint& sp) {
  const Eigen::MatrixXcd w = build_W_general(model, sp);
  const int n = static_cast<int>(sp.psi.size());
  // (psi, conj(psi)) is annihilated by the W form; particle conservation
  Eigen::VectorXcd v0(2 * n);
  v0.head(n) = sp.psi;
  v0.tail(n) = sp.psi.conjugate();
  const double w_scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if ((w * v0).norm() > std::max(1e-8 * w_scale, 20.0 * sp.residual))
    throw NumericalError("bogoliubov_spectrum: conservation null vector residual too large");
  return analyze(w);
}

std::complex<double> ring_frequency_closed_form(const Model& model, int mode_o, int dm) {
  if (model.geometry() != Geometry::Ring)
    throw std::invalid_argument("ring_frequency_closed_form: not a ring");
  const int L = model.length();
  const double k_hop = model.hopping();
  const double phi = model.phi() - 2.0 * kPi * mode_o;  // unfolded
  const double q = 2.0 * kPi * dm / L;
  const double s = std::sin(q / 2.0);
  const double eps_par = 2.0 * k_hop * std::cos(phi / L) * s * s;
  const double eps_perp = k_hop * std::sin(phi / L) * std::sin(q);
  const cd root = std::sqrt(cd((eps_par + 2.0 * model.delta()) * eps_par, 0.0));
  return eps_perp + root;
}

std::vector<std::complex<double>> ring_frequencies_closed_form(const Model& model, int mode_o) {
  std::vector<cd> out;
  for (int dm = 1; dm < model.length(); ++dm)
    out.push_back(ring_frequency_closed_form(model, mode_o, dm));
  return out;
}

std::complex<double> chain_zero_order_frequency(const Model& model, int mode_o, int mode_k) {
  if (model.geometry() != Geometry::Chain)
    throw std::invalid_argument("chain_zero_order_frequency: not a chain");
  const double eps_o = model.orbital(model.index_of_mode(mode_o)).energy;
  const double eps_k = model.orbital(model.index_of_mode(mode_k)).energy;
  const double eps_par = eps_k - eps_o;
  const double r = (eps_par + 2.0 * model.delta()) * eps_par;
  if (r >= 0.0) return cd((eps_par >= 0.0 ? 1.0 : -1.0) * std::sqrt(r), 0.0);
  return cd(0.0, std::sqrt(-r));
}

std::optional<double> chain_zero_order_onset(const Model& model, int mode_o, int mode_k) {
  const double eps_o = model.orbital(model.index_of_mode(mode_o)).energy;
  const double eps_k = model.orbital(model.index_of_mode(mode_k)).energy;
  const double eps_par = eps_k - eps_o;
  if (eps_par >= 0.0) return std::nullopt;  // radicand stays non-negative
  // complex once 2 Delta > -eps_par, i.e. u > L (eps_o - eps_k) / (2K)
  return model.length() * (-eps_par) / (2.0 * model.hopping());
}

FiveSiteChainFrequencies five_site_chain_closed_form(double u) {
  const double c0 = 1.0 / 16.0 + u * u * u / 64.0;
  const double c1 = 3.0 / 4.0 + u / 8.0 + u * u * u / 32.0;
  const double c2 = 9.0 / 4.0 + u / 4.0 + u * u / 16.0;
  const double d0 = c2 * c2 - 3.0 * c1;
  const double d1 = 2.0 * c2 * c2 * c2 - 9.0 * c1 * c2 + 27.0 * c0;
  const double disc = d1 * d1 - 4.0 * d0 * d0 * d0;

  const cd big_c = std::pow(0.5 * (d1 + std::sqrt(cd(disc, 0.0))), 1.0 / 3.0);
  const cd xi = std::polar(1.0, 2.0 * kPi / 3.0);
  std::array<cd, 3> roots;
  for (int k = 0; k < 3; ++k) {
    const cd ck = big_c * std::pow(xi, k);
    roots[k] = (c2 + ck + d0 / ck) / 3.0;
  }

  FiveSiteChainFrequencies out;
  out.discriminant = disc;
  // Below u_c the three roots are real and ordered (no crossings while the
  // discriminant is negative); above it the conjugate pair belongs to omega_{+-1}.
  if (disc <= 0.0) {
    std::array<double, 3> re{roots[0].real(), roots[1].real(), roots[2].real()};
    std::sort(re.begin(), re.end());
    out.lambda_m1 = re[0];
    out.lambda_p1 = re[1];
    out.lambda_3 = re[2];
  } else {
    int real_idx = 0;
    double min_im = std::numeric_limits<double>::max();
    for (int k = 0; k < 3; ++k)
      if (std::abs(roots[k].imag()) < min_im) {
        min_im = std::abs(roots[k].imag());
        real_idx = k;
      }
    out.lambda_3 = roots[real_idx].real();
    std::array<cd, 2> pair;
    int j = 0;
    for (int k = 0; k < 3; ++k)
      if (k != real_idx) pair[j++] = roots[k];
    out.lambda_p1 = pair[0].imag() > 0.0 ? pair[0] : pair[1];
    out.lambda_m1 = std::conj(out.lambda_p1);
  }
  out.omega_m1 = -std::sqrt(out.lambda_m1);
  out.omega_p1 = std::sqrt(out.lambda_p1);
  out.omega_2 = std::sqrt(cd(1.0 + 0.5 * u, 0.0));
  out.omega_3 = std::sqrt(out.lambda_3);
  return out;
}

double five_site_chain_critical_u() {
  double lo = 0.5, hi = 2.0;
  // discriminant is negative at lo (real frequencies) and positive at hi
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (five_site_chain_closed_form(mid).discriminant < 0.0 ? lo : hi) = mid;
    if (hi - lo < 1e-12) break;
  }
  return 0.5 * (lo + hi);
}

DarkStateFrequencies dark_state_frequencies(double u) {
  const double u2 = u * u;
  const cd s9 = std::sqrt(cd(u2 - 9.0, 0.0));
  const cd s27 = std::sqrt(cd(u2 - 27.0, 0.0));
  DarkStateFrequencies f;
  f.p1 = std::sqrt(cd(0.25 + u2 / 18.0, 0.0) + (u / 18.0) * s9);
  f.m1 = -std::sqrt(cd(0.25 + u2 / 18.0, 0.0) - (u / 18.0) * s9);
  f.p2 = std::sqrt(cd(0.75 + u2 / 18.0, 0.0) + (u / 18.0) * s27);
  f.m2 = -std::sqrt(cd(0.75 + u2 / 18.0, 0.0) - (u / 18.0) * s27);
  return f;
}

Eigen::MatrixXd build_P_tilde(const Model& model, const StationaryPoint& sp) {
  const Eigen::MatrixXcd& f = model.orbital_matrix();
  const Eigen::MatrixXcd pt = f.adjoint() * sp.density().asDiagonal() * f;
  if (pt.imag().cwiseAbs().maxCoeff() > 1e-12)
    throw NumericalError("build_P_tilde: unexpected imaginary part");
  return pt.real();
}

BlockApproxResult block_approximation(const Model& model, const StationaryPoint& sp) {
  if (model.geometry() != Geometry::Chain)
    throw std::invalid_argument("block_approximation: chain only");
  const int Ls = model.sites();
  const int L = model.length();
  const double g = sp.u * model.hopping();  // N U
  const Eigen::VectorXd p = sp.density();
  const int mo_idx = model.index_of_mode(sp.mode);
  const double ko = model.orbital(mo_idx).k;

  const auto site_sum = [&](double ka, double kb) {
    double acc = 0.0;
    for (int j = 0; j < Ls; ++j)
      acc += std::sin(ka * (j + 1)) * std::sin(kb * (j + 1)) * p(j);
    return g * (2.0 / L) * acc;
  };

  BlockApproxResult out;
  out.delta_o = site_sum(ko, ko);
  out.delta_k.resize(Ls);
  for (int idx = 0; idx < Ls; ++idx) {
    const double k = model.orbital(idx).k;
    out.delta_k(idx) = site_sum(k, k);
  }

  const auto e_tilde = [&](int idx) {
    return model.orbital(idx).energy + 2.0 * out.delta_o - sp.mu;
  };

  const int mo = sp.mode;
  for (int dm = 1; dm <= Ls - mo; ++dm) {
    const int m_hi = mo + dm;
    const int m_lo = mo - dm;
    if (m_lo >= 1) {
      // 4x4 block over (b_{-}, b_{+}, b+_{-}, b+_{+})
      const int ihi = model.index_of_mode(m_hi);
      const int ilo = model.index_of_mode(m_lo);
      const double dq = site_sum(model.orbital(ihi).k, model.orbital(ilo).k);
      const double em = e_tilde(ilo), ep = e_tilde(ihi);
      const double dkm = out.delta_k(ilo), dkp = out.delta_k(ihi);
      Eigen::Matrix4d m;
      m << em, 2.0 * dq, -dkm, -dq,
           2.0 * dq, ep, -dq, -dkp,
           dkm, dq, -em, -2.0 * dq,
           dq, dkp, -2.0 * dq, -ep;
      // characteristic polynomial is bi-quadratic: lambda^4 - alpha lambda^2 + beta
      const double alpha = 0.5 * (m * m).trace();
      const double beta = m.determinant();
      const cd root = std::sqrt(cd(alpha * alpha - 4.0 * beta, 0.0));
      const cd l2_small = 0.5 * (alpha - root);
      const cd l2_large = 0.5 * (alpha + root);
      BlockApproxResult::LowPair pair;
      pair.dm = dm;
      pair.delta_q = dq;
      pair.omegas = {std::sqrt(l2_small), std::sqrt(l2_large)};
      out.low.push_back(pair);
    } else {
      const int ihi = model.index_of_mode(m_hi);
      const double e = e_tilde(ihi);
      const double dk = out.delta_k(ihi);
      const double r = e * e - dk * dk;
      BlockApproxResult::HighMode hm;
      hm.mode = m_hi;
      hm.omega = (r >= 0.0) ? cd((e >= 0.0 ? 1.0 : -1.0) * std::sqrt(r), 0.0)
                            : cd(0.0, std::sqrt(-r));
      out.high.push_back(hm);
    }
  }
  return out;
}

namespace {

StabilityClass classify_ring_closed_form(const Model& base, int mode_o, double phi, double u) {
  const Model m = Model::from_u(base.geometry(), base.sites(), base.particles(), u, phi,
                                base.hopping());
  bool neg = false;
  for (int dm = 1; dm < m.length(); ++dm) {
    const cd w = ring_frequency_closed_form(m, mode_o, dm);
    if (is_complex_mode(w)) return StabilityClass::Unstable;
    if (w.real() < -kComplexTol) neg = true;
  }
  return neg ? StabilityClass::DS : StabilityClass::ES;
}

}  // namespace

double ring_phi_c_es_implicit(const Model& base, double u) {
  const int L = base.length();
  const double q = 2.0 * kPi / L;
  const double rhs = -(u / L) + std::sqrt((u / L) * (u / L) + 4.0 * std::cos(q / 2.0) * std::cos(q / 2.0));
  return L * std::acos(0.5 * rhs);
}

StabilityDiagram ring_stability_diagram(const Model& base, int mode_o,
                                        const std::vector<double>& phi_grid,
                                        const std::vector<double>& u_grid) {
  StabilityDiagram d;
  d.phi_grid = phi_grid;
  d.u_grid = u_grid;
  d.cells.resize(phi_grid.size() * u_grid.size());
  for (std::size_t iu = 0; iu < u_grid.size(); ++iu)
    for (std::size_t ip = 0; ip < phi_grid.size(); ++ip)
      d.cells[iu * phi_grid.size() + ip] =
          classify_ring_closed_form(base, mode_o, phi_grid[ip], u_grid[iu]);

  const auto bisect_between = [&](double lo, double hi, double u,
                                  auto&& changed) {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (changed(classify_ring_closed_form(base, mode_o, mid, u)) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };

  d.phi_c_es.assign(u_grid.size(), std::numeric_limits<double>::quiet_NaN());
  d.phi_c_inst.assign(u_grid.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t iu = 0; iu < u_grid.size(); ++iu) {
    for (std::size_t ip = 0; ip + 1 < phi_grid.size(); ++ip) {
      const StabilityClass a = d.at(iu, ip);
      const StabilityClass b = d.at(iu, ip + 1);
      if (a == b) continue;
      if (a == StabilityClass::ES && std::isnan(d.phi_c_es[iu]))
        d.phi_c_es[iu] = bisect_between(phi_grid[ip], phi_grid[ip + 1], u_grid[iu],
                                        [](StabilityClass c) { return c != StabilityClass::ES; });
      if (b == StabilityClass::Unstable && std::isnan(d.phi_c_inst[iu]))
        d.phi_c_inst[iu] =
            bisect_between(phi_grid[ip], phi_grid[ip + 1], u_grid[iu],
                           [](StabilityClass c) { return c == StabilityClass::Unstable; });
    }
  }
  return d;
}

namespace {

struct ChainProbe {
  // classification along the continued branch, with checkpoint reuse
  const Model& base;
  int mode_o;
  StationaryPoint checkpoint;

  explicit ChainProbe(const Model& b, int mo)
      : base(b), mode_o(mo), checkpoint(zero_u_sp(b, mo)) {}

  StabilityClass classify(double u) {
    const Model m =
        Model::from_u(base.geometry(), base.sites(), base.particles(), u, 0.0, base.hopping());
    StationaryPoint sp = (u >= checkpoint.u)
                             ? continue_sp_from(checkpoint, m)
                             : continue_sp(m, mode_o);
    if (u >= checkpoint.u) checkpoint = sp;
    return bogoliubov_spectrum(m, sp).classification;
  }
};

}  // namespace

CriticalU critical_u(const Model& base, int mode_o, double u_cap, double tol) {
  if (base.geometry() != Geometry::Chain)
    throw std::invalid_argument("critical_u: chain only");
  ChainProbe probe(base, mode_o);
  // coarse upward march to bracket the onset
  const double du = std::max(tol, u_cap / 200.0);
  double lo = 0.0;
  double hi = -1.0;
  for (double u = du; u <= u_cap + 1e-12; u += du) {
    if (probe.classify(u) == StabilityClass::Unstable) {
      hi = u;
      break;
    }
    lo = u;
  }
  if (hi < 0.0) return {u_cap, false};
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    ChainProbe p2(base, mode_o);  // fresh continuation to mid (monotone path)
    (p2.classify(mid) == StabilityClass::Unstable ? hi : lo) = mid;
  }
  return {0.5 * (lo + hi), true};
}

std::vector<FrequencyScanRow> frequency_scan(const Model& base, int mode_o,
                                             const std::vector<double>& u_values) {
  std::vector<FrequencyScanRow> rows;
  StationaryPoint sp = zero_u_sp(base, mode_o);
  for (double u : u_values) {
    const Model m =
        Model::from_u(base.geometry(), base.sites(), base.particles(), u, base.phi(), base.hopping());
    sp = continue_sp_from(sp, m);
    const BogoSpectrum spec = bogoliubov_spectrum(m, sp);
    rows.push_back({u, spec.physical});
  }
  return rows;
}

}  // namespace bht
