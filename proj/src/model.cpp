#include "bhtomo/model.hpp"

#include <algorithm>
#include <cmath>

namespace bht {

namespace {
constexpr double kTensorCutoff = 1e-12;

long flat_key(int n, int k4, int k3, int k2, int k1) {
  return ((static_cast<long>(k4) * n + k3) * n + k2) * n + k1;
}
}  // namespace

InteractionTensor::InteractionTensor(const Eigen::MatrixXcd& f, int length)
    : n_(static_cast<int>(f.cols())) {
  const int sites = static_cast<int>(f.rows());
  const double scale = static_cast<double>(length);
  entries_.reserve(static_cast<std::size_t>(n_) * n_ * n_);
  for (int k4 = 0; k4 < n_; ++k4)
    for (int k3 = 0; k3 < n_; ++k3)
      for (int k2 = 0; k2 < n_; ++k2)
        for (int k1 = 0; k1 < n_; ++k1) {
          std::complex<double> s = 0.0;
          for (int j = 0; j < sites; ++j)
            s += std::conj(f(j, k4)) * std::conj(f(j, k3)) * f(j, k2) * f(j, k1);
          s *= scale;
          if (std::abs(s) > kTensorCutoff) entries_.push_back({k4, k3, k2, k1, s.real()});
        }
}

double InteractionTensor::value(int k4, int k3, int k2, int k1) const {
  const long key = flat_key(n_, k4, k3, k2, k1);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [this](const Entry& e, long k) {
                               return flat_key(n_, e.k4, e.k3, e.k2, e.k1) < k;
                             });
  if (it == entries_.end() || flat_key(n_, it->k4, it->k3, it->k2, it->k1) != key) return 0.0;
  return it->c;
}

Model Model::build(Geometry geometry, int sites, int particles, double hopping,
                   double interaction, double phi) {
  if (sites < 2) throw std::invalid_argument("model: need at least 2 sites");
  if (particles < 1) throw std::invalid_argument("model: need at least 1 particle");
  if (hopping <= 0.0) throw std::invalid_argument("model: hopping K must be positive");
  if (interaction < 0.0) throw std::invalid_argument("model: interaction U must be non-negative");
  if (geometry == Geometry::Chain && phi != 0.0)
    throw std::invalid_argument("model: a chain has no Sagnac phase (phi must be 0)");

  Model m;
  m.geometry_ = geometry;
  m.sites_ = sites;
  m.length_ = (geometry == Geometry::Ring) ? sites : sites + 1;
  m.particles_ = particles;
  m.hopping_ = hopping;
  m.interaction_ = interaction;
  m.phi_ = phi;
  m.init_orbitals();
  return m;
}

Model Model::from_u(Geometry geometry, int sites, int particles, double u, double phi,
                    double hopping) {
  return build(geometry, sites, particles, hopping, u * hopping / particles, phi);
}

void Model::init_orbitals() {
  const int Ls = sites_;
  const int L = length_;
  orbitals_.resize(Ls);
  orbital_matrix_.resize(Ls, Ls);
  const std::complex<double> im(0.0, 1.0);

  if (geometry_ == Geometry::Ring) {
    for (int idx = 0; idx < Ls; ++idx) {
      Orbital& o = orbitals_[idx];
      o.m = idx;
      o.k = 2.0 * kPi * idx / L;
      o.energy = -hopping_ * std::cos(o.k - phi_ / L);
      o.coeff.resize(Ls);
      for (int j = 0; j < Ls; ++j)
        o.coeff(j) = std::exp(im * (o.k * (j + 1))) / std::sqrt(static_cast<double>(L));
      orbital_matrix_.col(idx) = o.coeff;
    }
  } else {
    for (int idx = 0; idx < Ls; ++idx) {
      Orbital& o = orbitals_[idx];
      o.m = idx + 1;
      o.k = kPi * o.m / L;
      o.energy = -hopping_ * std::cos(o.k);
      o.coeff.resize(Ls);
      for (int j = 0; j < Ls; ++j)
        o.coeff(j) = std::sqrt(2.0 / L) * std::sin(o.k * (j + 1));
      orbital_matrix_.col(idx) = o.coeff;
    }
  }

  hopping_matrix_ = Eigen::MatrixXcd::Zero(Ls, Ls);
  if (geometry_ == Geometry::Ring) {
    const std::complex<double> bond = -0.5 * hopping_ * std::exp(im * (phi_ / Ls));
    for (int j = 0; j < Ls; ++j) {
      const int jp = (j + 1) % Ls;
      hopping_matrix_(jp, j) += bond;
      hopping_matrix_(j, jp) += std::conj(bond);
    }
  } else {
    for (int j = 0; j + 1 < Ls; ++j) {
      hopping_matrix_(j + 1, j) += -0.5 * hopping_;
      hopping_matrix_(j, j + 1) += -0.5 * hopping_;
    }
  }
}

int Model::index_of_mode(int m) const {
  const int idx = (geometry_ == Geometry::Ring) ? m : m - 1;
  if (idx < 0 || idx >= sites_) throw std::invalid_argument("model: invalid orbital mode label");
  return idx;
}

DimensionlessParams Model::dimensionless_params(int mode_o) const {
  DimensionlessParams p{};
  p.u = u();
  p.u_global = u_global();
  p.delta = delta();
  p.dnlse = p.delta / hopping_;
  const double ek = kinetic_energy(index_of_mode(mode_o));
  p.gpe = (ek > 0.0) ? p.delta / ek : std::numeric_limits<double>::infinity();
  return p;
}

const InteractionTensor& Model::interaction_tensor() const {
  if (!tensor_) tensor_ = std::make_shared<const InteractionTensor>(orbital_matrix_, length_);
  return *tensor_;
}

}  // namespace bht
