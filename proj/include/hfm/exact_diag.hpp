#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hfm/sparse_operator.hpp"
#include "hfm/spin_hilbert.hpp"

namespace hfm {

/// Sorted eigenvalues of one block (an S³_T sector or the full space).
struct Spectrum {
  std::vector<double> eigenvalues;
  std::optional<Eigen::MatrixXd> eigenvectors;  // columns aligned with eigenvalues
  std::optional<int> two_total_sz;              // empty: full space

  std::size_t size() const noexcept { return eigenvalues.size(); }
};

inline constexpr std::size_t kDefaultDenseCap = 20'000;

/// Dense symmetric eigensolve. Throws InfeasibleError above `dense_cap`; use
/// sector decomposition or lowest_eigenvalue() instead.
Spectrum full_spectrum(const SparseOperator& op, bool with_vectors = false, std::size_t dense_cap = kDefaultDenseCap);

struct LanczosOptions {
  double tolerance = 1e-9;
  std::size_t max_iterations = 1000;
  /// Orthonormal vectors projected out of the Krylov space (known eigenvectors).
  std::span<const Eigen::VectorXd> deflate{};
  unsigned seed = 20151;
};

struct LanczosResult {
  double value = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  Eigen::VectorXd vector;
};

/// Extremal eigenpair by Lanczos with full reorthogonalization. Converged
/// means ‖Av − θv‖ ≤ tolerance·max(1, |θ|). Throws ConvergenceError with the
/// best estimate otherwise.
LanczosResult lanczos_lowest(const SparseOperator& op, const LanczosOptions& options = {});
double lowest_eigenvalue(const SparseOperator& op, double tolerance = 1e-9);

/// Every S³_T sector of (lattice, spin), each with its spectrum.
struct SectorSystem {
  Lattice lattice;
  SpinValue spin;
  std::vector<SpinSector> sectors;
  std::vector<Spectrum> spectra;

  std::size_t num_sites() const noexcept { return lattice.num_sites(); }
  std::size_t total_dim() const;
};

SectorSystem diagonalize_sectors(const Lattice& lattice, SpinValue spin, bool with_vectors,
                                 std::size_t dense_cap = kDefaultDenseCap);

struct ThermalResult {
  double beta = 0.0;
  double free_energy_per_site = 0.0;
  double energy_per_site = 0.0;
  double log_partition = 0.0;
};

/// f = −(βN)⁻¹ ln Σ e^{−βE}, e = ⟨H⟩/N. Blocks must tile the whole Hilbert
/// space: either one unlabeled full-space spectrum or one spectrum per S³_T
/// label; anything else throws ConfigError.
ThermalResult free_energy(std::span<const Spectrum> blocks, double beta, std::size_t num_sites, SpinValue spin);
ThermalResult free_energy(const SectorSystem& system, double beta);

/// Normalized Gibbs weights per block, max-shifted; β = +inf keeps only the
/// ground multiplet (within 1e-9).
std::vector<std::vector<double>> gibbs_weights(std::span<const Spectrum> blocks, double beta);

/// Per-eigenstate expectation ⟨v_i|S_x·S_y|v_i⟩ for every block.
std::vector<std::vector<double>> pair_expectations(const SectorSystem& system, std::size_t x, std::size_t y);

double gibbs_average(std::span<const Spectrum> blocks, const std::vector<std::vector<double>>& values, double beta);

/// ⟨S_x·S_y⟩_β in the finite-volume Gibbs state; β may be 0 or +inf.
double thermal_two_point(const SectorSystem& system, double beta, std::size_t x, std::size_t y);

/// Geometric grid from start to stop inclusive.
std::vector<double> geometric_grid(double start, double stop, std::size_t points);

}  // namespace hfm
