#include "bhtomo/stationary.hpp"

#include <cmath>

namespace bht {

namespace {

double sp_residual(const Eigen::MatrixXcd& d, double nu_strength, const Eigen::VectorXcd& psi,
                   double mu) {
  const Eigen::VectorXcd f = d * psi + nu_strength * psi.cwiseAbs2().cwiseProduct(psi) - mu * psi;
  return f.norm();
}

void fix_gauge(Eigen::VectorXd& x) {
  const double scale = x.cwiseAbs().maxCoeff();
  for (int i = 0; i < x.size(); ++i) {
    if (std::abs(x(i)) > 1e-12 * scale) {
      if (x(i) < 0.0) x = -x;
      return;
    }
  }
}

// One Newton solve of the bordered system at fixed interaction strength g = N U.
// Returns false on non-convergence; x, mu are updated in place only on success.
bool newton_solve(const Eigen::MatrixXd& d, double g, Eigen::VectorXd& x, double& mu,
                  const ContinuationOptions& opts) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd xw = x;
  double muw = mu;
  Eigen::MatrixXd j(n + 1, n + 1);
  Eigen::VectorXd rhs(n + 1);
  for (int it = 0; it < opts.max_newton; ++it) {
    const Eigen::VectorXd x2 = xw.cwiseProduct(xw);
    const Eigen::VectorXd f = d * xw + g * x2.cwiseProduct(xw) - muw * xw;
    const double gcon = xw.squaredNorm() - 1.0;
    if (f.lpNorm<Eigen::Infinity>() < opts.tol && std::abs(gcon) < opts.tol) {
      x = xw;
      mu = muw;
      return true;
    }
    j.setZero();
    j.topLeftCorner(n, n) = d;
    j.topLeftCorner(n, n).diagonal() += (3.0 * g) * x2;
    j.topLeftCorner(n, n).diagonal().array() -= muw;
    j.topRightCorner(n, 1) = -xw;
    j.bottomLeftCorner(1, n) = 2.0 * xw.transpose();
    rhs.head(n) = -f;
    rhs(n) = -gcon;
    const Eigen::VectorXd step = j.partialPivLu().solve(rhs);
    if (!step.allFinite()) return false;
    xw += step.head(n);
    muw += step(n);
  }
  return false;
}

}  // namespace

Eigen::VectorXd StationaryPoint::psi_real() const {
  if (psi.imag().cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("stationary point is not real");
  return psi.real();
}

int node_count(const Eigen::VectorXd& psi) {
  const double scale = psi.cwiseAbs().maxCoeff();
  int count = 0;
  int last_sign = 0;
  for (int i = 0; i < psi.size(); ++i) {
    if (std::abs(psi(i)) < 1e-8 * scale) continue;
    const int s = psi(i) > 0.0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++count;
    last_sign = s;
  }
  return count;
}

StationaryPoint zero_u_sp(const Model& model, int mode_o) {
  const int idx = model.index_of_mode(mode_o);
  StationaryPoint sp;
  sp.psi = model.orbital(idx).coeff;
  if (model.orbitals_real()) {
    Eigen::VectorXd x = sp.psi.real();
    fix_gauge(x);
    sp.psi = x.cast<std::complex<double>>();
  }
  sp.mu = model.orbital(idx).energy;
  sp.mode = mode_o;
  sp.u = 0.0;
  sp.residual = 0.0;
  return sp;
}

StationaryPoint continue_sp(const Model& model, int mode_o, ContinuationOptions opts) {
  return continue_sp_from(zero_u_sp(model, mode_o), model, opts);
}

StationaryPoint continue_sp_from(const StationaryPoint& start, const Model& model,
                                 ContinuationOptions opts) {
  const double u_target = model.u();
  if (u_target < 0.0) throw std::invalid_argument("continue_sp: u must be non-negative");
  const double k_hop = model.hopping();

  if (model.geometry() == Geometry::Ring) {
    // P is 1/L times the identity on a trivial ring SP: psi is u-independent and
    // mu is shifted by Delta.
    const int idx = model.index_of_mode(start.mode);
    StationaryPoint sp;
    sp.psi = model.orbital(idx).coeff;
    sp.mu = model.orbital(idx).energy + model.delta();
    sp.mode = start.mode;
    sp.u = u_target;
    sp.residual = sp_residual(model.hopping_matrix(), u_target * k_hop, sp.psi, sp.mu);
    return sp;
  }

  const Eigen::MatrixXd d = model.hopping_matrix().real();
  Eigen::VectorXd x = start.psi_real();
  double mu = start.mu;
  const int nodes0 = node_count(x);

  double u = start.u;
  const double span = u_target - u;
  if (span < 0.0)
    throw std::invalid_argument("continue_sp_from: cannot continue downward in u");
  if (opts.steps <= 0) opts.steps = std::max(50, static_cast<int>(std::ceil(20.0 * u_target)));
  double du = (span > 0.0) ? span / opts.steps : 0.0;

  if (span == 0.0) {
    if (!newton_solve(d, u * k_hop, x, mu, opts))
      throw NumericalError("continue_sp: Newton failed at u = " + std::to_string(u));
  }

  while (u < u_target - 1e-15) {
    double step = std::min(du, u_target - u);
    int halvings = 0;
    for (;;) {
      Eigen::VectorXd xt = x;
      double mut = mu;
      const double ut = u + step;
      if (newton_solve(d, ut * k_hop, xt, mut, opts)) {
        if (node_count(xt) != nodes0)
          throw NumericalError("continue_sp: node count changed at u = " + std::to_string(ut) +
                               " (branch jump); last converged u = " + std::to_string(u));
        x = xt;
        mu = mut;
        u = ut;
        break;
      }
      if (++halvings > opts.max_halvings)
        throw NumericalError("continue_sp: Newton failed to converge past u = " +
                             std::to_string(u) + " (possible bifurcation)");
      step *= 0.5;
    }
  }

  fix_gauge(x);
  StationaryPoint sp;
  sp.psi = x.cast<std::complex<double>>();
  sp.mu = mu;
  sp.mode = start.mode;
  sp.u = u_target;
  sp.residual = sp_residual(model.hopping_matrix(), u_target * k_hop, sp.psi, sp.mu);
  if (sp.residual > 1e-10)
    throw NumericalError("continue_sp: residual " + std::to_string(sp.residual) +
                         " above tolerance at u = " + std::to_string(u_target));
  return sp;
}

MuDecomposition mu_decomposition(const StationaryPoint& sp, const Model& model) {
  MuDecomposition md;
  md.eps_floor = model.floor_energy();
  md.delta = sp.u * model.hopping() / model.length();
  md.e_kin = sp.mu - md.eps_floor - md.delta;
  if (md.e_kin < -1e-9)
    throw NumericalError("mu_decomposition: negative kinetic part " + std::to_string(md.e_kin));
  return md;
}

SpOccupations sp_orbital_occupations(const StationaryPoint& sp, const Model& model) {
  const Eigen::VectorXcd amps = model.orbital_matrix().adjoint() * sp.psi;
  SpOccupations occ;
  occ.n_over_N = amps.cwiseAbs2();
  occ.n_sp_over_N = occ.n_over_N(model.index_of_mode(sp.mode));
  return occ;
}

double classical_hamiltonian(const Model& model, const Eigen::VectorXcd& psi) {
  const double n = model.particles();
  const double kin = (psi.adjoint() * model.hopping_matrix() * psi).value().real();
  const double quart = psi.cwiseAbs2().squaredNorm();
  return n * kin + 0.5 * model.interaction() * n * n * quart;
}

double coherent_state_energy(const Model& model, const Eigen::VectorXcd& psi) {
  const double n = model.particles();
  const double kin = (psi.adjoint() * model.hopping_matrix() * psi).value().real();
  const double quart = psi.cwiseAbs2().squaredNorm();
  return n * kin + 0.5 * model.interaction() * n * (n - 1.0) * quart;
}

double sp_energy(const StationaryPoint& sp, const Model& model) {
  const double n = model.particles();
  const double u_hop = sp.u * model.hopping();  // N U at the SP's interaction
  const double kin = (sp.psi.adjoint() * model.hopping_matrix() * sp.psi).value().real();
  const double quart = sp.psi.cwiseAbs2().squaredNorm();
  const double h_cl = n * kin + 0.5 * u_hop * n * quart;
  const double delta_n = (u_hop / model.length()) * n;
  return h_cl - delta_n;
}

}  // namespace bht
