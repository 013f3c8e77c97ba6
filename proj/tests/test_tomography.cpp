#include <doctest.h>

#include <cmath>

#include "bhtomo/linalg.hpp"
#include "bhtomo/tomography.hpp"

using namespace bht;

TEST_SUITE_BEGIN("tomography");

namespace {

struct Built {
  Model model;
  std::vector<FockBlock> blocks;
  std::vector<EigenSet> eigs;
};

Built build_all(Model m) {
  const auto basis = FockBasis::enumerate(m);
  auto blocks = symmetry_blocks(m, basis);
  std::vector<EigenSet> eigs;
  for (auto& b : blocks) {
    build_hamiltonian(m, b);
    eigs.push_back(diagonalize(b));
  }
  return {std::move(m), std::move(blocks), std::move(eigs)};
}

}  // namespace

TEST_CASE("u = 0 spectrum is exact and trace is preserved") {
  const Built d = build_all(Model::from_u(Geometry::Chain, 4, 4, 0.0));
  for (std::size_t bi = 0; bi < d.blocks.size(); ++bi) {
    const auto& b = d.blocks[bi];
    const auto& e = d.eigs[bi];
    std::vector<double> diag;
    for (int a = 0; a < b.dimension(); ++a) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += d.model.orbital(k).energy * b.states()[a][k];
      diag.push_back(s);
    }
    std::sort(diag.begin(), diag.end());
    for (int i = 0; i < e.energies.size(); ++i) CHECK(e.energies(i) == diag[i]);
  }
}

TEST_CASE("trace identity and eigenpair residuals") {
  const Built d = build_all(Model::from_u(Geometry::Ring, 4, 5, 1.7, 0.6));
  for (std::size_t bi = 0; bi < d.blocks.size(); ++bi) {
    const auto& h = d.blocks[bi].hamiltonian();
    const auto& e = d.eigs[bi];
    CHECK(std::abs(h.trace() - e.energies.sum()) <=
          1e-8 * std::max(1.0, std::abs(h.trace())));
    const double hnorm = h.cwiseAbs().maxCoeff();
    for (int i = 0; i < e.energies.size(); ++i) {
      const double res = (h * e.vectors.col(i) - e.energies(i) * e.vectors.col(i)).norm();
      CHECK(res < 1e-8 * std::max(1.0, hnorm));
    }
    CHECK((e.vectors.transpose() * e.vectors -
           Eigen::MatrixXd::Identity(e.energies.size(), e.energies.size()))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
  }
}

TEST_CASE("L_s=2 ring N=2: eigenvalues match the closed-form roots") {
  const double u = 0.9;
  const Model m = Model::from_u(Geometry::Ring, 2, 2, u);
  const double U = m.interaction();
  const double e0 = m.orbital(0).energy, e1 = m.orbital(1).energy;
  // P=0 block is {(2,0),(0,2)}: 2x2 with diagonal 2 e + U/2 and coupling U/2;
  // closed-form roots by the quadratic formula.
  const double a = 2.0 * e0 + U / 2.0;
  const double c = 2.0 * e1 + U / 2.0;
  const double b = U / 2.0;
  const double mid = 0.5 * (a + c), rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  const double p1 = e0 + e1 + U;  // (1,1) singlet sector

  const Built d = build_all(m);
  std::vector<double> got;
  for (const auto& e : d.eigs)
    for (int i = 0; i < e.energies.size(); ++i) got.push_back(e.energies(i));
  std::sort(got.begin(), got.end());
  std::vector<double> expect = {mid - rad, p1, mid + rad};
  std::sort(expect.begin(), expect.end());
  REQUIRE(got.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("occupation distribution") {
  const Built d = build_all(Model::from_u(Geometry::Chain, 3, 4, 0.0));
  const auto& b = d.blocks[0];
  const auto& e = d.eigs[0];
  const int ko = d.model.index_of_mode(1);

  // condensate eigenstate at u = 0 has P(N) = 1
  int cond = -1;
  for (int a = 0; a < b.dimension(); ++a)
    if (b.states()[a][ko] == 4) cond = a;
  REQUIRE(cond >= 0);
  for (int nu = 0; nu < e.energies.size(); ++nu) {
    const Eigen::VectorXd v = e.vectors.col(nu);
    if (std::abs(v(cond)) > 0.999) {
      const Eigen::VectorXd p = occupation_distribution(b, v, ko, 4);
      CHECK(p(4) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  // uniform vector counts states; distribution sums to one; mean matches <n_o>
  Eigen::VectorXd vu = Eigen::VectorXd::Constant(b.dimension(), 1.0 / std::sqrt(b.dimension()));
  const Eigen::VectorXd p = occupation_distribution(b, vu, ko, 4);
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
  for (int n = 0; n <= 4; ++n) {
    int count = 0;
    for (int a = 0; a < b.dimension(); ++a)
      if (b.states()[a][ko] == n) ++count;
    CHECK(p(n) == doctest::Approx(static_cast<double>(count) / b.dimension()).epsilon(1e-12));
  }
  double mean = 0.0;
  for (int n = 0; n <= 4; ++n) mean += n * p(n);
  CHECK(mean ==
        doctest::Approx(occupation_diagonal(b, ko).dot(vu.cwiseProduct(vu))).epsilon(1e-12));
}

TEST_CASE("purity basics") {
  Eigen::MatrixXcd rank1 = Eigen::MatrixXcd::Zero(5, 5);
  rank1(2, 2) = 1.0;
  CHECK(purity(rank1) == doctest::Approx(1.0));
  CHECK(purity(Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(5, 5) / 5.0)) ==
        doctest::Approx(0.2));

  // spectral identity on a random hermitian density matrix
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(4, 4);
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace().real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += es.eigenvalues()(i) * es.eigenvalues()(i);
  CHECK(purity(rho) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("one-body matrix: condensate and fragmented limits") {
  const Built d = build_all(Model::from_u(Geometry::Chain, 3, 4, 0.0));
  const auto& b = d.blocks[0];
  const int ko = d.model.index_of_mode(1);
  int cond = -1;
  for (int a = 0; a < b.dimension(); ++a)
    if (b.states()[a][ko] == 4) cond = a;
  REQUIRE(cond >= 0);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(b.dimension());
  v(cond) = 1.0;
  const Eigen::MatrixXcd rho = one_body_matrix(d.model, b, v);
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
  CHECK(purity(rho) == doctest::Approx(1.0).epsilon(1e-12));
  // site-basis projector onto the orbital
  const Eigen::VectorXcd orb = d.model.orbital(ko).coeff;
  CHECK((rho - orb * orb.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("one-body matrix agrees with a site-basis brute force (chain L_s=3, N=3)") {
  const Model m = Model::from_u(Geometry::Chain, 3, 3, 1.8);
  // site-basis Fock space: same enumeration, H = hopping + on-site U n(n-1)/2
  const auto basis = FockBasis::enumerate(m);
  const int dim = static_cast<int>(basis.size());
  std::unordered_map<FockState, int, FockStateHash> index;
  for (int i = 0; i < dim; ++i) index[basis.states()[i]] = i;

  const Eigen::MatrixXd d = m.hopping_matrix().real();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    const auto& s = basis.states()[a];
    for (int j = 0; j < 3; ++j) h(a, a) += 0.5 * m.interaction() * s[j] * (s[j] - 1);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j || d(i, j) == 0.0 || s[j] == 0) continue;
        FockState t = s;
        t[j] -= 1;
        t[i] += 1;
        h(index[t], a) += d(i, j) * std::sqrt(static_cast<double>(s[j]) * t[i]);
      }
  }
  const SymEig se = eig_sym(h);
  const Eigen::VectorXd ground = se.vectors.col(0);
  Eigen::MatrixXd rho_direct = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) {
        for (int a = 0; a < dim; ++a)
          rho_direct(i, i) += ground(a) * ground(a) * basis.states()[a][i];
        continue;
      }
      for (int a = 0; a < dim; ++a) {
        const auto& s = basis.states()[a];
        if (s[j] == 0) continue;
        FockState t = s;
        t[j] -= 1;
        t[i] += 1;
        rho_direct(i, j) += ground(index[t]) * std::sqrt(static_cast<double>(s[j]) * t[i]) * ground(a);
      }
    }
  rho_direct /= 3.0;

  // library path: ground state of the unblocked k-basis Hamiltonian
  const Eigen::MatrixXd hk = build_hamiltonian_unblocked(m, basis);
  const SymEig sk = eig_sym(hk);
  CHECK(sk.values(0) == doctest::Approx(se.values(0)).epsilon(1e-10));
  // wrap the full basis as a single block to reuse the library machinery
  BlockLabel all;
  all.geometry = Geometry::Chain;
  FockBlock full(all, basis.states());
  const Eigen::MatrixXcd rho_lib = one_body_matrix(m, full, sk.vectors.col(0));
  CHECK((rho_lib.real() - rho_direct).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(rho_lib.imag().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(purity(rho_lib) == doctest::Approx(purity(Eigen::MatrixXcd(rho_direct.cast<std::complex<double>>()))).epsilon(1e-10));
}

TEST_CASE("tomographic spectrum: u = 0 anchors and sum rules") {
  const Built d = build_all(Model::from_u(Geometry::Chain, 4, 5, 1.3));
  std::vector<std::pair<const FockBlock*, const EigenSet*>> sectors;
  for (std::size_t i = 0; i < d.blocks.size(); ++i)
    sectors.push_back({&d.blocks[i], &d.eigs[i]});
  const auto points = tomographic_spectrum(d.model, sectors, 2);

  // sum over orbitals of <n_k> equals N for every eigenstate
  std::size_t pi = 0;
  for (std::size_t bi = 0; bi < d.blocks.size(); ++bi) {
    for (int nu = 0; nu < d.eigs[bi].energies.size(); ++nu, ++pi) {
      const Eigen::VectorXd v = d.eigs[bi].vectors.col(nu);
      double total = 0.0;
      for (int k = 0; k < 4; ++k)
        total += occupation_diagonal(d.blocks[bi], k).dot(v.cwiseProduct(v));
      CHECK(std::abs(total - 5.0) < 1e-10);
      CHECK(points[pi].purity >= 1.0 / 4.0 - 1e-12);
      CHECK(points[pi].purity <= 1.0 + 1e-12);
    }
  }

  // u = 0: integer occupations and purity = sum (n_k/N)^2
  const Built free_d = build_all(Model::from_u(Geometry::Chain, 4, 5, 0.0));
  std::vector<std::pair<const FockBlock*, const EigenSet*>> fs;
  for (std::size_t i = 0; i < free_d.blocks.size(); ++i)
    fs.push_back({&free_d.blocks[i], &free_d.eigs[i]});
  const auto fpoints = tomographic_spectrum(free_d.model, fs, 1);
  pi = 0;
  for (std::size_t bi = 0; bi < free_d.blocks.size(); ++bi) {
    const auto& b = free_d.blocks[bi];
    for (int nu = 0; nu < free_d.eigs[bi].energies.size(); ++nu, ++pi) {
      const Eigen::VectorXd v = free_d.eigs[bi].vectors.col(nu);
      int which = -1;
      v.cwiseAbs().maxCoeff(&which);
      const auto& s = b.states()[which];
      double sum_sq = 0.0;
      for (int k = 0; k < 4; ++k) sum_sq += (s[k] / 5.0) * (s[k] / 5.0);
      CHECK(fpoints[pi].n_o_mean == doctest::Approx(static_cast<double>(s[0])).epsilon(1e-10));
      CHECK(fpoints[pi].purity == doctest::Approx(sum_sq).epsilon(1e-10));
    }
  }

  // the u = 0 condensate point sits at E = eps_{k_o} N
  double best_n = -1.0, best_e = 0.0;
  for (const auto& p : fpoints)
    if (p.n_o_mean > best_n) {
      best_n = p.n_o_mean;
      best_e = p.energy;
    }
  CHECK(best_n == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(best_e ==
        doctest::Approx(5.0 * free_d.model.orbital(free_d.model.index_of_mode(1)).energy)
            .epsilon(1e-10));
}

TEST_CASE("purity is basis invariant") {
  const Built d = build_all(Model::from_u(Geometry::Chain, 4, 4, 2.2));
  const auto& b = d.blocks[0];
  const Eigen::VectorXd v = d.eigs[0].vectors.col(1);
  const double s_orb = purity(Eigen::MatrixXcd(
      one_body_matrix_orbital(d.model, b, v).cast<std::complex<double>>()));
  const double s_site = purity(one_body_matrix(d.model, b, v));
  CHECK(s_orb == doctest::Approx(s_site).epsilon(1e-12));
}

TEST_CASE("tomography output is deterministic") {
  const auto run = [] {
    const Built d = build_all(Model::from_u(Geometry::Ring, 4, 4, 1.1, 0.4));
    std::vector<std::pair<const FockBlock*, const EigenSet*>> sectors;
    for (std::size_t i = 0; i < d.blocks.size(); ++i)
      sectors.push_back({&d.blocks[i], &d.eigs[i]});
    return tomo_csv(tomographic_spectrum(d.model, sectors, 0));
  };
  const std::string a = run(), b = run();
  CHECK(a == b);
  CHECK(a.substr(0, a.find('\n')) == "sector,nu,E,n_o_mean,purity,inv_purity");
}

TEST_SUITE_END();
