#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hfm/exact_diag.hpp"
#include "hfm/lattice.hpp"
#include "hfm/spin_hilbert.hpp"
#include "hfm/spin_wave.hpp"

namespace hfm {

struct SectorMinimaRow {
  int two_st = 0;
  double e_min = 0.0;         // lowest H eigenvalue with this S_T (highest-weight copy)
  double e_min_check = 0.0;   // same, read off the smallest-|S³_T| sector
  double deficit = 0.0;       // S·N − S_T
  double ratio = 0.0;         // e_min·ℓ²/(S·deficit); NaN when deficit = 0
};

struct SectorMinimaTable {
  int side = 0;
  SpinValue spin{};
  std::vector<SectorMinimaRow> rows;  // S_T descending
  double c_empirical = 0.0;           // min ratio over deficit > 0
  double cross_check_deviation = 0.0;
  bool monotone = true;               // e_min non-increasing in S_T
};

/// Lowest energy in each total-spin sector of H_ℓ. Throws BoundViolation if
/// the top multiplet is not at zero or c_empirical ≤ 0.
SectorMinimaTable proposition1_table(const Lattice& lattice, SpinValue spin);

struct GapRow {
  int side = 0;
  double gap = 0.0;        // lowest nonzero one-magnon energy, free boundary
  double analytic = 0.0;   // S·2(1 − cos(π/ℓ))
  double scaled = 0.0;     // gap·ℓ²/S
};

/// One-magnon gap of free-boundary boxes of dimension `dim`; small blocks by
/// dense solve, larger ones by Lanczos with the uniform mode deflated.
std::vector<GapRow> gap_scaling(SpinValue spin, std::span<const int> sides, int dim = 3);

struct BoundReport {
  double beta = 0.0;
  double f_exact = 0.0;
  double f_trial_upper = 0.0;
  double trial_energy = 0.0;    // Tr(HΓ)/N
  double trial_entropy = 0.0;   // −Tr(Γ ln Γ)/N
  double f0_reference = 0.0;    // f0_finite on the same box
  double literature_upper = 0.0;  // C_0 log2 S^{-3/2} β^{-5/2}
  double slack = 0.0;           // f_trial_upper − f_exact
  double truncation_deficit = 0.0;
};

/// Gibbs variational value of Γ = P e^{−βH_0} P / Tr_{F_S} P e^{−βH_0}.
/// e^{−βH_0} is evaluated blockwise in the boson space truncated at n_max
/// (default 2S·N, which is exact), then compressed to F_S.
BoundReport trial_state_upper_bound(const Lattice& lattice, SpinValue spin, double beta,
                                    std::optional<int> n_max = std::nullopt);

struct LiteratureRow {
  double beta = 0.0;
  double f0 = 0.0;
  double c0_asymptotic = 0.0;  // C_0 S^{-3/2} β^{-5/2}
  double spin_half_bound = 0.0;  // C_0 log 2 · 2^{3/2} β^{-5/2}
  double relative_gap = 0.0;   // |f0 / c0_asymptotic − 1|
  double preliminary = 0.0;    // −C S [ln(Sβ)/(Sβ)]^{5/2}; NaN without C
};

std::vector<LiteratureRow> literature_comparison(std::span<const double> beta_grid, SpinValue spin,
                                                 std::optional<double> preliminary_c = std::nullopt,
                                                 const QuadratureOptions& options = {});

struct CorollaryRow {
  double beta = 0.0;
  std::size_t x = 0;
  std::size_t y = 0;
  int distance_squared = 0;
  double lhs = 0.0;     // S² − ⟨S_x·S_y⟩_β
  double energy = 0.0;  // e(β)
  double ratio = 0.0;   // lhs / (|x−y|² e)
};

struct CorollaryReport {
  std::vector<CorollaryRow> rows;
  double max_ratio = 0.0;
  double sum_rule_error = 0.0;   // max over β of |Σ_bonds lhs − N e|
  double min_lhs = 0.0;
  double limit_lhs = 0.0;        // max over pairs at β = ∞
  bool monotone = true;          // lhs non-increasing along the β grid, per pair
};

/// Two-point deficits for every site pair over the β grid (β = 0 allowed).
/// Throws BoundViolation if a deficit is negative, the sum rule fails by more
/// than 1e-10, or the β → ∞ deficit does not vanish.
CorollaryReport corollary_chain_check(const Lattice& lattice, SpinValue spin, std::span<const double> beta_grid);

/// e(β) = ⟨H⟩_β/N for β in [0, ∞].
double energy_per_site(const SectorSystem& system, double beta);

}  // namespace hfm
