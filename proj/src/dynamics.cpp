#include "bhtomo/dynamics.hpp"

#include <cmath>

#include "bhtomo/rng.hpp"

namespace bht {

namespace {
using cd = std::complex<double>;
const cd kI(0.0, 1.0);

// Exact flows of the two DNLSE pieces; composed with Yoshida's 4th-order coefficients.
struct SplitStepper {
  const Eigen::MatrixXcd& f;  // orbital matrix
  Eigen::VectorXcd eps;       // orbital energies
  double g;                   // N U
  Eigen::VectorXcd scratch;

  SplitStepper(const Model& m)
      : f(m.orbital_matrix()), g(m.particles() * m.interaction()) {
    eps.resize(m.orbital_count());
    for (int k = 0; k < m.orbital_count(); ++k) eps(k) = m.orbital(k).energy;
  }

  void kick(Eigen::VectorXcd& psi, double tau) const {
    for (int j = 0; j < psi.size(); ++j)
      psi(j) *= std::exp(-kI * (g * std::norm(psi(j)) * tau));
  }
  void drift(Eigen::VectorXcd& psi, double tau) {
    scratch.noalias() = f.adjoint() * psi;
    for (int k = 0; k < scratch.size(); ++k) scratch(k) *= std::exp(-kI * (eps(k) * tau));
    psi.noalias() = f * scratch;
  }
  void strang(Eigen::VectorXcd& psi, double tau) {
    kick(psi, 0.5 * tau);
    drift(psi, tau);
    kick(psi, 0.5 * tau);
  }
  void step(Eigen::VectorXcd& psi, double dt) {
    static const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    static const double w0 = 1.0 - 2.0 * w1;
    strang(psi, w1 * dt);
    strang(psi, w0 * dt);
    strang(psi, w1 * dt);
  }
};

struct Rk4Stepper {
  const Model& model;
  void step(Eigen::VectorXcd& psi, double dt) const {
    const Eigen::VectorXcd k1 = dnlse_rhs(model, psi);
    const Eigen::VectorXcd k2 = dnlse_rhs(model, psi + 0.5 * dt * k1);
    const Eigen::VectorXcd k3 = dnlse_rhs(model, psi + 0.5 * dt * k2);
    const Eigen::VectorXcd k4 = dnlse_rhs(model, psi + dt * k3);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
};

}  // namespace

Eigen::VectorXcd dnlse_rhs(const Model& model, const Eigen::VectorXcd& psi) {
  const double g = model.particles() * model.interaction();
  return -kI * (model.hopping_matrix() * psi + g * psi.cwiseAbs2().cwiseProduct(psi));
}

Trajectory integrate(const Model& model, const Eigen::VectorXcd& psi0, double t_final,
                     IntegratorOptions opts) {
  if (t_final <= 0.0) throw std::invalid_argument("integrate: duration must be positive");
  const int n_steps = static_cast<int>(std::llround(t_final / std::abs(opts.dt)));
  const int stride = std::max(1, static_cast<int>(std::llround(opts.sample_interval / std::abs(opts.dt))));
  const int n_samples = n_steps / stride + 1;
  const double t_burn = opts.burn_in_fraction * t_final;
  const int Ls = model.sites();
  const double n = model.particles();
  const double e_scale = std::max(std::abs(classical_hamiltonian(model, psi0)),
                                  n * model.hopping());

  Trajectory traj;
  traj.times.reserve(n_samples);
  traj.n_k_t.resize(Ls, n_samples);
  if (opts.store_psi) traj.psi_t.resize(Ls, n_samples);
  traj.n_k_mean = Eigen::VectorXd::Zero(Ls);
  traj.rho_mean = Eigen::MatrixXcd::Zero(Ls, Ls);
  traj.energy0 = classical_hamiltonian(model, psi0);

  SplitStepper split(model);
  Rk4Stepper rk4{model};
  Eigen::VectorXcd psi = psi0;

  int col = 0;
  const auto sample = [&](double t) {
    const Eigen::VectorXcd amps = model.orbital_matrix().adjoint() * psi;
    traj.times.push_back(t);
    traj.n_k_t.col(col) = n * amps.cwiseAbs2();
    if (opts.store_psi) traj.psi_t.col(col) = psi;
    ++col;
    traj.norm_drift = std::max(traj.norm_drift, std::abs(psi.squaredNorm() - 1.0));
    const double e = classical_hamiltonian(model, psi);
    traj.energy_drift_rel =
        std::max(traj.energy_drift_rel, std::abs(e - traj.energy0) / e_scale);
    if (opts.enforce_monitors &&
        (traj.norm_drift > opts.norm_tol || traj.energy_drift_rel > opts.energy_tol))
      throw NumericalError("integrate: drift exceeded tolerance at t = " + std::to_string(t) +
                           " (norm " + std::to_string(traj.norm_drift) + ", energy " +
                           std::to_string(traj.energy_drift_rel) + ")");
    if (t >= t_burn) {
      traj.n_k_mean += traj.n_k_t.col(col - 1);
      traj.rho_mean += psi * psi.adjoint();
      ++traj.mean_samples;
    }
  };

  sample(0.0);
  for (int s = 1; s <= n_steps; ++s) {
    if (opts.scheme == Scheme::SplitStep4)
      split.step(psi, opts.dt);
    else
      rk4.step(psi, opts.dt);
    if (s % stride == 0) sample(s * std::abs(opts.dt));
  }
  traj.n_k_t.conservativeResize(Ls, col);
  if (opts.store_psi) traj.psi_t.conservativeResize(Ls, col);
  if (traj.mean_samples > 0) {
    traj.n_k_mean /= traj.mean_samples;
    traj.rho_mean /= traj.mean_samples;
  }
  traj.psi_final = psi;
  return traj;
}

Eigen::VectorXd time_average_occupations(const Trajectory& traj, double t_burn) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(traj.n_k_t.rows());
  int count = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] < t_burn) continue;
    acc += traj.n_k_t.col(i);
    ++count;
  }
  if (count == 0) throw std::invalid_argument("time_average_occupations: burn-in too long");
  return acc / count;
}

double classical_purity(const Trajectory& traj) {
  if (traj.mean_samples == 0)
    throw std::invalid_argument("classical_purity: no post-burn samples");
  const Eigen::MatrixXcd rho = traj.rho_mean / traj.rho_mean.trace().real();
  return (rho * rho).trace().real();
}

Eigen::VectorXd occupation_histogram(const Trajectory& traj, int orbital_index, int particles,
                                     double t_burn) {
  Eigen::VectorXd hist = Eigen::VectorXd::Zero(particles + 1);
  int count = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] < t_burn) continue;
    const int bin = std::clamp(
        static_cast<int>(std::llround(traj.n_k_t(orbital_index, i))), 0, particles);
    hist(bin) += 1.0;
    ++count;
  }
  if (count == 0) throw std::invalid_argument("occupation_histogram: burn-in too long");
  return hist / count;
}

LyapunovResult lyapunov_exponent(const Model& model, const Eigen::VectorXcd& psi0, double t_final,
                                 double renorm_interval, double d0, std::uint64_t seed,
                                 IntegratorOptions opts) {
  std::mt19937_64 rng = task_rng(seed, 0x4c59);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd delta(psi0.size());
  for (int j = 0; j < psi0.size(); ++j) delta(j) = cd(gauss(rng), gauss(rng));
  delta *= d0 / delta.norm();

  Eigen::VectorXcd a = psi0;
  Eigen::VectorXcd b = psi0 + delta;
  b /= b.norm();

  SplitStepper split(model);
  Rk4Stepper rk4{model};
  const int steps_per_interval =
      std::max(1, static_cast<int>(std::llround(renorm_interval / opts.dt)));
  const int intervals = std::max(1, static_cast<int>(std::llround(t_final / renorm_interval)));

  std::vector<double> logs;
  logs.reserve(intervals);
  for (int i = 1; i <= intervals; ++i) {
    for (int s = 0; s < steps_per_interval; ++s) {
      if (opts.scheme == Scheme::SplitStep4) {
        split.step(a, opts.dt);
        split.step(b, opts.dt);
      } else {
        rk4.step(a, opts.dt);
        rk4.step(b, opts.dt);
      }
    }
    const double d = (b - a).norm();
    logs.push_back(std::log(d / d0));
    b = a + (b - a) * (d0 / d);
  }

  // the first fifth is transient (launches near an SP linger before joining the
  // surrounding flow); the estimate uses the remainder
  const std::size_t skip = logs.size() / 5;
  std::vector<double> running;
  double log_sum = 0.0;
  for (std::size_t i = skip; i < logs.size(); ++i) {
    log_sum += logs[i];
    running.push_back(log_sum / ((i - skip + 1) * renorm_interval));
  }

  LyapunovResult out;
  out.gamma = running.back();
  const std::size_t tail_start = running.size() - std::max<std::size_t>(1, running.size() / 5);
  double mean = 0.0, sq = 0.0;
  const std::size_t m = running.size() - tail_start;
  for (std::size_t i = tail_start; i < running.size(); ++i) mean += running[i];
  mean /= m;
  for (std::size_t i = tail_start; i < running.size(); ++i)
    sq += (running[i] - mean) * (running[i] - mean);
  out.plateau_std = std::sqrt(sq / m);
  out.plateaued = out.plateau_std < 0.15 * std::max(std::abs(out.gamma), 2.0 / t_final);
  return out;
}

std::vector<PhaseSpaceSample> sample_energy_shell(const Model& model, double energy, double window,
                                                  int count, std::uint64_t seed) {
  if (window <= 0.0) throw std::invalid_argument("sample_energy_shell: window must be positive");
  std::mt19937_64 rng = task_rng(seed, 0xe5);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  const int Ls = model.sites();

  std::vector<PhaseSpaceSample> out;
  long attempts = 0;
  Eigen::VectorXcd psi(Ls);
  while (static_cast<int>(out.size()) < count) {
    ++attempts;
    double tot = 0.0;
    for (int j = 0; j < Ls; ++j) {
      const double p = expo(rng);
      psi(j) = std::polar(std::sqrt(p), angle(rng));
      tot += p;
    }
    psi /= std::sqrt(tot);
    const double e = classical_hamiltonian(model, psi);
    if (std::abs(e - energy) < window) out.push_back({psi, e});
    if (attempts >= 100000 && static_cast<double>(out.size()) / attempts < 1e-4)
      throw NumericalError(
          "sample_energy_shell: acceptance rate below 1e-4 after " + std::to_string(attempts) +
          " draws (" + std::to_string(out.size()) + " accepted); widen the window or move E");
  }
  return out;
}

Eigen::VectorXcd protocol_state(const Model& model, const StationaryPoint& sp, double n_o_frac,
                                std::mt19937_64& rng) {
  if (n_o_frac < 0.0 || n_o_frac > 1.0)
    throw std::invalid_argument("protocol_state: n_o fraction outside [0, 1]");
  const int Ls = model.sites();
  const int ko = model.index_of_mode(sp.mode);
  const SpOccupations occ = sp_orbital_occupations(sp, model);

  Eigen::VectorXd w = occ.n_over_N;
  w(ko) = 0.0;
  const double rest = w.sum();
  if (rest > 1e-8)
    w /= rest;
  else
    for (int k = 0; k < Ls; ++k) w(k) = (k == ko) ? 0.0 : 1.0 / (Ls - 1);

  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
  Eigen::VectorXcd amps(Ls);
  for (int k = 0; k < Ls; ++k) {
    if (k == ko)
      amps(k) = std::sqrt(n_o_frac);
    else
      amps(k) = std::polar(std::sqrt((1.0 - n_o_frac) * w(k)), angle(rng));
  }
  return model.orbital_matrix() * amps;
}

std::vector<ErgodicityPoint> ergodicity_map(const Model& model, const StationaryPoint& sp,
                                            const std::vector<double>& n_o_grid, double t_final,
                                            int seeds, std::uint64_t master_seed,
                                            IntegratorOptions opts) {
  const int ko = model.index_of_mode(sp.mode);
  std::vector<ErgodicityPoint> out;
  for (std::size_t gi = 0; gi < n_o_grid.size(); ++gi) {
    double acc = 0.0;
    for (int s = 0; s < seeds; ++s) {
      std::mt19937_64 rng = task_rng(master_seed, gi * 1000 + s);
      const Eigen::VectorXcd psi0 = protocol_state(model, sp, n_o_grid[gi], rng);
      const Trajectory traj = integrate(model, psi0, t_final, opts);
      acc += traj.n_k_mean(ko) / model.particles();
    }
    out.push_back({n_o_grid[gi], acc / seeds});
  }
  return out;
}

std::vector<ClassicalTomoPoint> classical_tomography(const Model& model,
                                                     const std::vector<PhaseSpaceSample>& samples,
                                                     int mode_o, double t_final,
                                                     IntegratorOptions opts) {
  const int ko = model.index_of_mode(mode_o);
  std::vector<ClassicalTomoPoint> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    const Trajectory traj = integrate(model, s.psi, t_final, opts);
    out.push_back({s.energy, traj.n_k_mean(ko), classical_purity(traj)});
  }
  return out;
}

}  // namespace bht
