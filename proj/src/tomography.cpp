#include "bhtomo/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bhtomo/linalg.hpp"

namespace bht {

namespace {

void fix_phases(Eigen::MatrixXd& vectors) {
  for (int c = 0; c < vectors.cols(); ++c) {
    int imax = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&imax);
    if (vectors(imax, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

bool is_diagonal(const Eigen::MatrixXd& h) {
  for (int c = 0; c < h.cols(); ++c)
    for (int r = 0; r < h.rows(); ++r)
      if (r != c && h(r, c) != 0.0) return false;
  return true;
}

}  // namespace

EigenSet diagonalize(const FockBlock& block) {
  if (!block.has_hamiltonian())
    throw std::invalid_argument("diagonalize: block Hamiltonian not built");
  const auto& h = block.hamiltonian();
  EigenSet out;
  out.label = block.label();

  if (is_diagonal(h)) {
    const int n = block.dimension();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&h](int a, int b) { return h(a, a) < h(b, b); });
    out.energies.resize(n);
    out.vectors = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      out.energies(i) = h(order[i], order[i]);
      out.vectors(order[i], i) = 1.0;
    }
    return out;
  }

  SymEig se;
  try {
    se = eig_sym(h);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + " in block " + block.label().name());
  }
  out.energies = std::move(se.values);
  out.vectors = std::move(se.vectors);
  fix_phases(out.vectors);
  return out;
}

Eigen::VectorXd occupation_distribution(const FockBlock& block, const Eigen::VectorXd& v,
                                        int orbital_index, int particles) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(particles + 1);
  for (int a = 0; a < block.dimension(); ++a)
    p(block.states()[a][orbital_index]) += v(a) * v(a);
  return p;
}

Eigen::MatrixXd one_body_matrix_orbital(const Model& model, const FockBlock& block,
                                        const Eigen::VectorXd& v) {
  const int L = model.orbital_count();
  const int N = model.particles();
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(L, L);

  for (int k = 0; k < L; ++k) {
    double nk = 0.0;
    for (int a = 0; a < block.dimension(); ++a)
      nk += v(a) * v(a) * block.states()[a][k];
    rho(k, k) = nk / N;
  }

  // Inside a symmetry sector, <b+_k b_k'> vanishes for momentum-changing pairs
  // (ring) and for orbital pairs of opposite reflection sign (chain).
  const bool ring_block = model.geometry() == Geometry::Ring && block.label().momentum >= 0;
  const bool parity_block = model.geometry() == Geometry::Chain && block.label().parity != 0;
  FockState t;
  for (int k = 0; k < L; ++k) {
    for (int kp = k + 1; kp < L; ++kp) {
      if (ring_block) continue;
      if (parity_block && (k + kp) % 2 != 0) continue;
      double acc = 0.0;
      for (int a = 0; a < block.dimension(); ++a) {
        const FockState& s = block.states()[a];
        if (s[kp] == 0) continue;
        t = s;
        t[kp] -= 1;
        t[k] += 1;
        const int b = block.index_of(t);
        if (b < 0) continue;
        acc += v(b) * std::sqrt(static_cast<double>(s[kp]) * t[k]) * v(a);
      }
      rho(k, kp) = acc / N;
      rho(kp, k) = rho(k, kp);
    }
  }
  return rho;
}

Eigen::MatrixXcd one_body_matrix(const Model& model, const FockBlock& block,
                                 const Eigen::VectorXd& v) {
  const Eigen::MatrixXd rho_orb = one_body_matrix_orbital(model, block, v);
  const Eigen::MatrixXcd& f = model.orbital_matrix();
  return f * rho_orb * f.adjoint();
}

double purity(const Eigen::MatrixXcd& rho) { return (rho * rho).trace().real(); }
double purity(const Eigen::MatrixXd& rho) { return (rho * rho).trace(); }

namespace {

// Precomputed action of b+_k b_k' on a block basis: target index and sqrt factor per source state.
struct HopTable {
  int k, kp;
  std::vector<int> target;    // -1 if annihilation kills the state or target leaves the block
  std::vector<double> amp;
};

std::vector<HopTable> hop_tables(const Model& model, const FockBlock& block) {
  std::vector<HopTable> tables;
  const bool ring_block = model.geometry() == Geometry::Ring && block.label().momentum >= 0;
  const bool parity_block = model.geometry() == Geometry::Chain && block.label().parity != 0;
  if (ring_block) return tables;  // rho is diagonal per momentum block
  const int L = model.orbital_count();
  FockState t;
  for (int k = 0; k < L; ++k)
    for (int kp = k + 1; kp < L; ++kp) {
      if (parity_block && (k + kp) % 2 != 0) continue;  // opposite reflection signs
      HopTable tab;
      tab.k = k;
      tab.kp = kp;
      tab.target.resize(block.dimension(), -1);
      tab.amp.resize(block.dimension(), 0.0);
      for (int a = 0; a < block.dimension(); ++a) {
        const FockState& s = block.states()[a];
        if (s[kp] == 0) continue;
        t = s;
        t[kp] -= 1;
        t[k] += 1;
        const int b = block.index_of(t);
        if (b < 0) continue;
        tab.target[a] = b;
        tab.amp[a] = std::sqrt(static_cast<double>(s[kp]) * t[k]);
      }
      tables.push_back(std::move(tab));
    }
  return tables;
}

}  // namespace

std::vector<TomoPoint> tomographic_spectrum(
    const Model& model,
    const std::vector<std::pair<const FockBlock*, const EigenSet*>>& sectors, int mode_o) {
  const int ko = model.index_of_mode(mode_o);
  const int L = model.orbital_count();
  const int N = model.particles();
  std::vector<TomoPoint> points;
  for (const auto& [block, eig] : sectors) {
    std::vector<Eigen::VectorXd> n_diag(L);
    for (int k = 0; k < L; ++k) n_diag[k] = occupation_diagonal(*block, k);
    const auto tables = hop_tables(model, *block);

    Eigen::MatrixXd rho(L, L);
    for (int nu = 0; nu < eig->energies.size(); ++nu) {
      const Eigen::VectorXd v = eig->vectors.col(nu);
      const Eigen::VectorXd v2 = v.cwiseProduct(v);
      rho.setZero();
      for (int k = 0; k < L; ++k) rho(k, k) = n_diag[k].dot(v2) / N;
      for (const auto& tab : tables) {
        double acc = 0.0;
        for (int a = 0; a < block->dimension(); ++a)
          if (tab.target[a] >= 0) acc += v(tab.target[a]) * tab.amp[a] * v(a);
        rho(tab.k, tab.kp) = acc / N;
        rho(tab.kp, tab.k) = rho(tab.k, tab.kp);
      }
      TomoPoint pt;
      pt.sector = block->label().name();
      pt.nu = nu;
      pt.energy = eig->energies(nu);
      pt.n_o_mean = rho(ko, ko) * N;
      pt.purity = purity(rho);
      pt.inv_purity = 1.0 / pt.purity;
      points.push_back(pt);
    }
  }
  return points;
}

std::string tomo_csv(const std::vector<TomoPoint>& points) {
  std::ostringstream os;
  os << "sector,nu,E,n_o_mean,purity,inv_purity\n";
  char buf[160];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.12g,%.12g,%.12g,%.12g\n", p.sector.c_str(), p.nu,
                  p.energy, p.n_o_mean, p.purity, p.inv_purity);
    os << buf;
  }
  return os.str();
}

}  // namespace bht
