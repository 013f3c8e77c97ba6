#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "bhtomo/model.hpp"

namespace bht {

// Occupations {n_k} over the L_s orbitals (0-based orbital indices).
using FockState = std::vector<int>;

struct FockStateHash {
  std::size_t operator()(const FockState& s) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int v : s) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b9;
      h *= 1099511628211ull;
    }
    return h;
  }
};

struct BlockLabel {
  Geometry geometry{};
  int momentum = -1;  // ring sector P = sum m n_m mod L_s, or -1
  int parity = 0;     // chain sector: +1 even, -1 odd, or 0
  std::string name() const;
};

std::size_t fock_dimension(int orbital_count, int particles);

// Complete, duplicate-free basis in descending lexicographic order.
class FockBasis {
public:
  static constexpr std::size_t kDefaultCap = 2'000'000;
  static FockBasis enumerate(const Model& model, std::size_t cap = kDefaultCap);

  const std::vector<FockState>& states() const { return states_; }
  std::size_t size() const { return states_.size(); }

private:
  std::vector<FockState> states_;
};

// Ring sector label of a state: total momentum index mod L_s.
int ring_momentum(const FockState& s, int sites);
// Chain sector label: reflection eigenvalue (-1)^{sum (m+1) n_m} = +-1.
int chain_parity(const FockState& s);

// One symmetry sector: member states, index lookup, and (once built) the dense Hamiltonian.
class FockBlock {
public:
  FockBlock(BlockLabel label, std::vector<FockState> states);

  const BlockLabel& label() const { return label_; }
  const std::vector<FockState>& states() const { return states_; }
  int dimension() const { return static_cast<int>(states_.size()); }
  int index_of(const FockState& s) const;  // -1 if not a member

  bool has_hamiltonian() const { return h_.size() > 0; }
  const Eigen::MatrixXd& hamiltonian() const { return h_; }
  Eigen::MatrixXd& mutable_hamiltonian() { return h_; }
  void release_hamiltonian() { h_.resize(0, 0); }

private:
  BlockLabel label_;
  std::vector<FockState> states_;
  std::unordered_map<FockState, int, FockStateHash> index_;
  Eigen::MatrixXd h_;
};

inline constexpr std::size_t kDefaultBlockCap = 12'000;

// Partition the basis into symmetry sectors (ring: L_s momentum blocks; chain: even, odd).
std::vector<FockBlock> symmetry_blocks(const Model& model, const FockBasis& basis);

// Fill block.hamiltonian() with the k-orbital-basis many-body Hamiltonian (real symmetric).
void build_hamiltonian(const Model& model, FockBlock& block,
                       std::size_t block_cap = kDefaultBlockCap);

// Diagonal of the n_{k} occupation operator over the block basis.
Eigen::VectorXd occupation_diagonal(const FockBlock& block, int orbital_index);

// Debug path for small instances: the Hamiltonian over the full unblocked basis.
Eigen::MatrixXd build_hamiltonian_unblocked(const Model& model, const FockBasis& basis);

// (row, col, re, im) dump for external cross-checks.
void dump_hamiltonian_csv(const FockBlock& block, std::ostream& os);

}  // namespace bht
