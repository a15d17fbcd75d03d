#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "hfm/lattice.hpp"
#include "hfm/quadrature.hpp"
#include "hfm/sparse_operator.hpp"
#include "hfm/spin_hilbert.hpp"

namespace hfm {

/// ε(k) = 2 Σ_i (1 − cos k_i), evaluated as 4 Σ sin²(k_i/2).
double dispersion(std::span<const double> k);

/// ε at grid momentum i, from the integer mode vector.
double dispersion(const MomentumGrid& grid, std::size_t i);

/// Sector holding one deviation from full polarization (2S³_T = 2SN − 2).
SpinSector one_magnon_sector(const Lattice& lattice, SpinValue spin);

/// S × (graph Laplacian of the lattice), written in the one-magnon basis.
SparseOperator one_magnon_laplacian(const SpinSector& one_magnon);

/// Plane wave N^{-1/2} Σ_x e^{−ik·x} |x lowered⟩ for grid mode n. Needs a
/// periodic lattice; verifies ‖Hv − Sε(k)v‖ ≤ 1e-10 before returning.
std::vector<std::complex<double>> spin_wave_state(const SpinSector& one_magnon, const Coord& mode);

struct NeumannMode {
  Coord quantum_numbers{};
  double eigenvalue = 0.0;  // S · 2Σ(1 − cos(πn_i/ℓ))
  std::vector<double> vector;
};

/// Product-cosine one-magnon eigenmodes of a free-boundary box, sorted by
/// eigenvalue. Every mode is checked by residual (1e-10); for blocks up to
/// 2000 states the eigenvalue list is also compared with a dense solve.
std::vector<NeumannMode> neumann_modes(const SpinSector& one_magnon);

enum class SpinWaveMode { FiniteGrid, Quadrature };

struct SpinWaveFreeEnergy {
  double beta = 0.0;
  SpinValue spin{};
  double value = 0.0;
  SpinWaveMode mode = SpinWaveMode::FiniteGrid;
  int resolution = 0;        // side L for FiniteGrid, Gauss order for Quadrature
  double error_bound = 0.0;  // quadrature only
  std::size_t excluded_modes = 0;  // k = 0 is dropped from the finite sum
};

/// (βL^d)^{-1} Σ_{k≠0} ln(1 − e^{−βSε(k)}) over the periodic momentum grid.
SpinWaveFreeEnergy f0_finite(const Lattice& lattice, SpinValue spin, double beta);

struct QuadratureOptions {
  int order = 15;             // Gauss-Legendre points per axis per cell
  double tolerance = 1e-10;   // relative
  std::size_t max_cells = 400'000;
};

/// (2π)^{-3} ∫_{[−π,π]³} ln(1 − e^{−a ε(k)}) dk with a = βS, so that
/// f_0 = result / β. Cells are refined geometrically toward the logarithmic
/// singularity at k = 0 and adaptively elsewhere; the residual corner cube is
/// bounded analytically.
BoundedValue spin_wave_integral(double beta_s, const QuadratureOptions& options = {});

/// Thermodynamic-limit f_0(β, S). Throws QuadratureError if the error bound
/// exceeds the requested tolerance.
SpinWaveFreeEnergy f0_limit(double beta, SpinValue spin, const QuadratureOptions& options = {});

struct C0Estimate {
  BoundedValue quadrature;   // radial integral of ln(1 − e^{−k²})
  BoundedValue closed_form;  // −ζ(5/2)/(8π^{3/2})
  double value = 0.0;
};

/// C_0 by two independent routes; throws ConsistencyError if they differ by
/// more than `tolerance` (which must be >= 1e-10).
C0Estimate c0_constant(double tolerance = 1e-10);

struct ScalingRow {
  double beta = 0.0;
  double spin = 0.0;
  double f0 = 0.0;
  double rescaled = 0.0;   // S^{3/2} β^{5/2} f_0
  double deviation = 0.0;  // |rescaled − C_0| / |C_0|
};

std::vector<ScalingRow> scaling_check(SpinValue spin, std::span<const double> beta_grid,
                                      const QuadratureOptions& options = {});

}  // namespace hfm
