#include "bhtomo/fock.hpp"

#include <cmath>
#include <ostream>

namespace bht {

std::string BlockLabel::name() const {
  if (geometry == Geometry::Ring && momentum >= 0) return "P" + std::to_string(momentum);
  if (geometry == Geometry::Chain && parity != 0) return parity > 0 ? "even" : "odd";
  return "all";
}

std::size_t fock_dimension(int orbital_count, int particles) {
  // C(N + L_s - 1, L_s - 1), exact with overflow guard
  const int n = particles + orbital_count - 1;
  const int k = orbital_count - 1;
  long double acc = 1.0L;
  for (int i = 1; i <= k; ++i) acc = acc * (n - k + i) / i;
  if (acc > 4e18L) throw SizeCapError("fock: basis dimension overflows", 0);
  return static_cast<std::size_t>(std::llroundl(acc));
}

FockBasis FockBasis::enumerate(const Model& model, std::size_t cap) {
  const int L = model.orbital_count();
  const int N = model.particles();
  const std::size_t dim = fock_dimension(L, N);
  if (dim > cap)
    throw SizeCapError("fock: basis dimension " + std::to_string(dim) + " exceeds cap " +
                           std::to_string(cap),
                       dim);

  FockBasis basis;
  basis.states_.reserve(dim);
  FockState cur(L, 0);
  // descending lexicographic enumeration
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == L - 1) {
      cur[pos] = left;
      basis.states_.push_back(cur);
      return;
    }
    for (int n = left; n >= 0; --n) {
      cur[pos] = n;
      self(self, pos + 1, left - n);
    }
  };
  rec(rec, 0, N);
  return basis;
}

int ring_momentum(const FockState& s, int sites) {
  long p = 0;
  for (int idx = 0; idx < static_cast<int>(s.size()); ++idx) p += static_cast<long>(idx) * s[idx];
  return static_cast<int>(p % sites);
}

int chain_parity(const FockState& s) {
  // orbital m = idx + 1 has reflection sign (-1)^{m+1}; (m+1) odd iff idx odd
  long odd = 0;
  for (int idx = 1; idx < static_cast<int>(s.size()); idx += 2) odd += s[idx];
  return (odd % 2 == 0) ? +1 : -1;
}

FockBlock::FockBlock(BlockLabel label, std::vector<FockState> states)
    : label_(label), states_(std::move(states)) {
  index_.reserve(states_.size() * 2);
  for (int i = 0; i < static_cast<int>(states_.size()); ++i) index_[states_[i]] = i;
}

int FockBlock::index_of(const FockState& s) const {
  auto it = index_.find(s);
  return it == index_.end() ? -1 : it->second;
}

std::vector<FockBlock> symmetry_blocks(const Model& model, const FockBasis& basis) {
  std::vector<FockBlock> blocks;
  if (model.geometry() == Geometry::Ring) {
    const int Ls = model.sites();
    std::vector<std::vector<FockState>> members(Ls);
    for (const auto& s : basis.states()) members[ring_momentum(s, Ls)].push_back(s);
    for (int p = 0; p < Ls; ++p) {
      BlockLabel lbl;
      lbl.geometry = Geometry::Ring;
      lbl.momentum = p;
      blocks.emplace_back(lbl, std::move(members[p]));
    }
  } else {
    std::vector<FockState> even, odd;
    for (const auto& s : basis.states()) (chain_parity(s) > 0 ? even : odd).push_back(s);
    BlockLabel le;
    le.geometry = Geometry::Chain;
    le.parity = +1;
    blocks.emplace_back(le, std::move(even));
    BlockLabel lo;
    lo.geometry = Geometry::Chain;
    lo.parity = -1;
    blocks.emplace_back(lo, std::move(odd));
  }
  return blocks;
}

namespace {

// Accumulate (U/2L) sum C[k4,k3,k2,k1] b+_{k4} b+_{k3} b_{k2} b_{k1} into H for
// every source state, using an index lookup for the target state.
template <typename Lookup>
void add_interaction(const Model& model, const std::vector<FockState>& states, Lookup&& lookup,
                     Eigen::MatrixXd& h) {
  if (model.interaction() == 0.0) return;
  const auto& tensor = model.interaction_tensor();
  const double pref = model.interaction() / (2.0 * model.length());
  FockState n;
  for (int a = 0; a < static_cast<int>(states.size()); ++a) {
    for (const auto& e : tensor.entries()) {
      const FockState& src = states[a];
      if (src[e.k1] == 0) continue;
      n = src;
      double amp = n[e.k1];
      n[e.k1] -= 1;
      if (n[e.k2] == 0) continue;
      amp *= n[e.k2];
      n[e.k2] -= 1;
      n[e.k3] += 1;
      amp *= n[e.k3];
      n[e.k4] += 1;
      amp *= n[e.k4];
      const int t = lookup(n);
      if (t < 0)
        throw NumericalError("fock: interaction leaves symmetry sector (sector " +
                             std::to_string(a) + ")");
      h(t, a) += pref * e.c * std::sqrt(amp);
    }
  }
}

Eigen::VectorXd kinetic_diagonal(const Model& model, const std::vector<FockState>& states) {
  const int L = model.orbital_count();
  Eigen::VectorXd d(states.size());
  for (int a = 0; a < static_cast<int>(states.size()); ++a) {
    double e = 0.0;
    for (int k = 0; k < L; ++k) e += model.orbital(k).energy * states[a][k];
    d(a) = e;
  }
  return d;
}

}  // namespace

void build_hamiltonian(const Model& model, FockBlock& block, std::size_t block_cap) {
  const std::size_t dim = block.states().size();
  if (dim > block_cap)
    throw SizeCapError("fock: block " + block.label().name() + " has " + std::to_string(dim) +
                           " states, exceeding the dense cap " + std::to_string(block_cap),
                       dim);
  Eigen::MatrixXd& h = block.mutable_hamiltonian();
  h = Eigen::MatrixXd::Zero(dim, dim);
  h.diagonal() = kinetic_diagonal(model, block.states());
  add_interaction(model, block.states(), [&block](const FockState& s) { return block.index_of(s); },
                  h);
}

Eigen::VectorXd occupation_diagonal(const FockBlock& block, int orbital_index) {
  Eigen::VectorXd d(block.dimension());
  for (int a = 0; a < block.dimension(); ++a) d(a) = block.states()[a][orbital_index];
  return d;
}

Eigen::MatrixXd build_hamiltonian_unblocked(const Model& model, const FockBasis& basis) {
  const std::size_t dim = basis.size();
  if (dim > kDefaultBlockCap)
    throw SizeCapError("fock: unblocked dimension too large", dim);
  std::unordered_map<FockState, int, FockStateHash> index;
  index.reserve(dim * 2);
  for (int i = 0; i < static_cast<int>(dim); ++i) index[basis.states()[i]] = i;

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  h.diagonal() = kinetic_diagonal(model, basis.states());
  add_interaction(model, basis.states(),
                  [&index](const FockState& s) {
                    auto it = index.find(s);
                    return it == index.end() ? -1 : it->second;
                  },
                  h);
  return h;
}

void dump_hamiltonian_csv(const FockBlock& block, std::ostream& os) {
  os << "row,col,re,im\n";
  const auto& h = block.hamiltonian();
  char buf[64];
  for (int c = 0; c < h.cols(); ++c)
    for (int r = 0; r < h.rows(); ++r) {
      if (h(r, c) == 0.0) continue;
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,0\n", r, c, h(r, c));
      os << buf;
    }
}

}  // namespace bht
