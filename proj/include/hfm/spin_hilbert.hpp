#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hfm/configuration_set.hpp"
#include "hfm/lattice.hpp"
#include "hfm/sparse_operator.hpp"

namespace hfm {

/// Spin quantum number stored as 2S so half-integers stay exact.
struct SpinValue {
  int two_s = 1;

  double value() const noexcept { return 0.5 * two_s; }
  int local_dim() const noexcept { return two_s + 1; }
  friend bool operator==(SpinValue a, SpinValue b) { return a.two_s == b.two_s; }
};

SpinValue make_spin(int two_s);

/// Accepts "2S=3", "S=3/2", "S=1.5", "3/2" or "1.5".
SpinValue parse_spin(std::string_view text);

/// Basis of (C^{2S+1})^{⊗N}, optionally restricted to fixed total S³.
///
/// Configurations are digit strings d_x = m_x + S ∈ {0..2S}, ordered
/// lexicographically in (m_0, m_1, ...). The same digits are boson
/// occupations under the Holstein-Primakoff correspondence.
class SpinSector {
 public:
  SpinSector(Lattice lattice, SpinValue spin, std::optional<int> two_total_sz,
             std::size_t cap = ConfigurationSet::kDefaultCap);

  const Lattice& lattice() const noexcept { return lattice_; }
  SpinValue spin() const noexcept { return spin_; }
  std::optional<int> two_total_sz() const noexcept { return two_total_sz_; }
  std::size_t dim() const noexcept { return configs_.size(); }
  std::size_t num_sites() const noexcept { return lattice_.num_sites(); }

  std::span<const Digit> digits(std::size_t i) const { return configs_.digits(i); }
  /// 2·m_x of basis state i.
  int two_m(std::size_t i, std::size_t site) const { return 2 * configs_.digits(i)[site] - spin_.two_s; }
  int two_total_m(std::size_t i) const;

  std::optional<std::size_t> index_of(std::span<const Digit> digits) const { return configs_.find(digits); }
  const ConfigurationSet& configurations() const noexcept { return configs_; }

 private:
  Lattice lattice_;
  SpinValue spin_;
  std::optional<int> two_total_sz_;
  ConfigurationSet configs_;
};

SpinSector build_sector(const Lattice& lattice, SpinValue spin, std::optional<int> two_total_sz = std::nullopt);

/// All allowed 2·S³_T values for N sites, descending from 2SN.
std::vector<int> sector_labels(const Lattice& lattice, SpinValue spin);

/// H = Σ_<xy> (S² − S_x·S_y).
SparseOperator build_hamiltonian(const SpinSector& sector);

/// S_T² = (Σ_x S_x)².
SparseOperator build_total_spin_squared(const SpinSector& sector);

/// S_x·S_y for one site pair (x != y).
SparseOperator build_spin_product(const SpinSector& sector, std::size_t x, std::size_t y);

/// Σ_pairs (constant + coupling·S_x·S_y); the building block of the operators above.
SparseOperator build_exchange(const SpinSector& sector, std::span<const Bond> pairs, double constant, double coupling);

/// Eigenvectors of H sharing one total-spin quantum number.
struct TotalSpinGroup {
  int two_st = 0;
  std::vector<double> energies;
  Eigen::MatrixXd vectors;  // columns, aligned with energies

  std::size_t size() const noexcept { return energies.size(); }
};

/// Simultaneous eigenbasis of H and S_T², grouped by S_T (descending).
/// Throws ConsistencyError if the operators do not commute to 1e-10 or an
/// S_T² eigenvalue is not of the form S_T(S_T+1) to 1e-8.
std::vector<TotalSpinGroup> decompose_by_total_spin(const SpinSector& sector, const SparseOperator& hamiltonian,
                                                    const SparseOperator& total_spin_squared);

/// True if every state in the S_T = S·N multiplet contained in `sector`
/// has <S_x·S_y> = S² on every bond, to 1e-12.
bool polarized_two_point_check(const SpinSector& sector);

}  // namespace hfm
