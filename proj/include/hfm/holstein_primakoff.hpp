#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hfm/configuration_set.hpp"
#include "hfm/lattice.hpp"
#include "hfm/sparse_operator.hpp"
#include "hfm/spin_hilbert.hpp"

namespace hfm {

/// Occupation-number basis with per-site cutoff n_x ≤ cutoff, optionally at
/// fixed total particle number. cutoff == 2S is the hard-core space F_S; a
/// larger cutoff is a truncation of the unconstrained boson space.
class FockBasis {
 public:
  FockBasis(Lattice lattice, SpinValue spin, int cutoff, std::optional<long> total_n,
            std::size_t cap = ConfigurationSet::kDefaultCap);

  const Lattice& lattice() const noexcept { return lattice_; }
  SpinValue spin() const noexcept { return spin_; }
  int cutoff() const noexcept { return cutoff_; }
  bool hard_core() const noexcept { return cutoff_ == spin_.two_s; }
  std::optional<long> total_n() const noexcept { return total_n_; }
  std::size_t dim() const noexcept { return configs_.size(); }
  std::size_t num_sites() const noexcept { return lattice_.num_sites(); }

  std::span<const Digit> occupations(std::size_t i) const { return configs_.digits(i); }
  std::optional<std::size_t> index_of(std::span<const Digit> occ) const { return configs_.find(occ); }
  const ConfigurationSet& configurations() const noexcept { return configs_; }

 private:
  Lattice lattice_;
  SpinValue spin_;
  int cutoff_;
  std::optional<long> total_n_;
  ConfigurationSet configs_;
};

/// Hard-core basis F_S (cutoff 2S).
FockBasis build_fock_basis(const Lattice& lattice, SpinValue spin, std::optional<long> total_n = std::nullopt);

/// Truncated unconstrained basis with occupancies up to n_max (> 2S).
FockBasis build_uncapped_basis(const Lattice& lattice, SpinValue spin, int n_max,
                               std::optional<long> total_n = std::nullopt);

/// Total boson number N_tot = S³_T + S·N for a sector label 2S³_T.
long total_particles(int two_total_sz, SpinValue spin, std::size_t num_sites);

/// |n_x⟩ ↔ |S³_x = n_x − S⟩: the Fock block matching `sector` plus, for each
/// spin basis index, its Fock index.
struct HpCorrespondence {
  FockBasis fock;
  std::vector<std::size_t> spin_to_fock;
};

HpCorrespondence hp_correspondence(const SpinSector& sector);

/// Index map between an existing sector and Fock block; throws ConfigError
/// if lattice, spin, cutoff or particle number do not match.
std::vector<std::size_t> hp_correspondence(const SpinSector& sector, const FockBasis& fock);

/// H_0 = S Σ_<xy> (a†_x − a†_y)(a_x − a_y) on the basis (any cutoff).
SparseOperator build_h0(const FockBasis& fock);

/// Bond-by-bond transcription −a†_x a†_y a_x a_y + 2S a†_x[1 − √(1−n̂_x/2S)√(1−n̂_y/2S)]a_y
/// with each bond taken as (x, y) or, if `reversed`, as (y, x). Not Hermitian
/// on its own; build_k() returns its Hermitian part.
SparseOperator build_k_oriented(const FockBasis& fock, bool reversed);

/// Interaction K (Hermitian). Needs the hard-core basis.
SparseOperator build_k(const FockBasis& fock);

struct BosonicHamiltonian {
  SparseOperator h0;
  SparseOperator k_int;
  SparseOperator hb;  // h0 + k_int
};

BosonicHamiltonian build_bosonic_hamiltonian(const FockBasis& fock);

/// Max |ΔE| between sorted spectra of the spin H on `sector` and H_0 + K on
/// the matching Fock block. Throws ConsistencyError above 1e-8.
double verify_equivalence(const SpinSector& sector, const FockBasis& fock);

/// min over basis states of Σ_x n_x(n_x − 1) − (1 − P), P the projection onto
/// n_x ≤ 2S. Exact integer arithmetic; needs cutoff > 2S.
long projection_inequality_check(const FockBasis& uncapped);

/// Diagonal ½ Σ_<xy> (4 n_x n_y + n_x(n_x−1) + n_y(n_y−1)).
SparseOperator build_interaction_majorant(const FockBasis& fock);

/// Smallest eigenvalue of build_interaction_majorant − K on the block.
double interaction_bound_check(const FockBasis& fock);

/// ρ(x,y) = ⟨Ψ|a†_x a†_y a_x a_y|Ψ⟩ for a normalized real Ψ.
Eigen::MatrixXd two_particle_density(std::span<const double> psi, const FockBasis& fock);

struct DensityRow {
  double energy = 0.0;
  double rho_inf = 0.0;
  double rho_1 = 0.0;
  double ratio = 0.0;  // ‖ρ‖_∞ S³ / (E³ ‖ρ‖_1)
};

/// Eigenstates of H_B in the total_n block with energy in (max(e_lo, 0), e_hi]
/// and nonzero ρ; one row per eigenvector.
std::vector<DensityRow> proposition2_survey(const Lattice& lattice, SpinValue spin, long total_n, double e_lo,
                                            double e_hi);

}  // namespace hfm
