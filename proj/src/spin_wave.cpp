#include "hfm/spin_wave.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <tuple>

#include <Eigen/Dense>

#include "hfm/errors.hpp"

namespace hfm {

namespace {

constexpr double kPi = std::numbers::pi;

double sin_sq_half(double k) {
  const double s = std::sin(0.5 * k);
  return 4.0 * s * s;
}

double residual_norm(const SparseOperator& h, std::span<const std::complex<double>> v, double lambda) {
  std::vector<std::complex<double>> hv(v.size());
  h.apply(v, hv);
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += std::norm(hv[i] - lambda * v[i]);
  return std::sqrt(acc);
}

std::size_t lowered_index(const SpinSector& sector, std::size_t site) {
  std::vector<Digit> config(sector.num_sites(), static_cast<Digit>(sector.spin().two_s));
  config[site] -= 1;
  const auto idx = sector.index_of(config);
  if (!idx) throw ConfigError("sector does not contain the one-magnon configuration");
  return *idx;
}

void require_one_magnon(const SpinSector& sector) {
  const int expected = sector.spin().two_s * static_cast<int>(sector.num_sites()) - 2;
  if (sector.two_total_sz() != expected) throw ConfigError("operation needs the one-magnon sector 2S3_T = 2SN - 2");
}

}  // namespace

double dispersion(std::span<const double> k) {
  double e = 0.0;
  for (double ki : k) e += sin_sq_half(ki);
  return e;
}

double dispersion(const MomentumGrid& grid, std::size_t i) {
  double e = 0.0;
  const Coord& n = grid.modes()[i];
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const double s = std::sin(kPi * n[axis] / grid.side());
    e += 4.0 * s * s;
  }
  return e;
}

SpinSector one_magnon_sector(const Lattice& lattice, SpinValue spin) {
  return SpinSector(lattice, spin, spin.two_s * static_cast<int>(lattice.num_sites()) - 2);
}

SparseOperator one_magnon_laplacian(const SpinSector& one_magnon) {
  require_one_magnon(one_magnon);
  const Lattice& lattice = one_magnon.lattice();
  const double s = one_magnon.spin().value();
  std::vector<std::size_t> index(lattice.num_sites());
  for (std::size_t x = 0; x < lattice.num_sites(); ++x) index[x] = lowered_index(one_magnon, x);
  std::vector<std::vector<SparseOperator::Entry>> rows(one_magnon.dim());
  for (const auto& [x, y] : lattice.bonds()) {
    rows[index[x]].emplace_back(index[x], s);
    rows[index[y]].emplace_back(index[y], s);
    rows[index[x]].emplace_back(index[y], -s);
    rows[index[y]].emplace_back(index[x], -s);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].emplace_back(i, 0.0);
  return SparseOperator::from_rows(std::move(rows));
}

std::vector<std::complex<double>> spin_wave_state(const SpinSector& one_magnon, const Coord& mode) {
  require_one_magnon(one_magnon);
  const Lattice& lattice = one_magnon.lattice();
  if (lattice.boundary() != Boundary::Periodic)
    throw ConfigError("plane-wave spin waves are eigenstates only with periodic boundaries; use neumann_modes");
  const int side = lattice.side();
  for (int axis = 0; axis < 3; ++axis)
    if (mode[axis] < 0 || mode[axis] >= side || (axis >= lattice.dim() && mode[axis] != 0))
      throw ConfigError("mode vector is not on the momentum grid");

  const double norm = 1.0 / std::sqrt(static_cast<double>(lattice.num_sites()));
  std::vector<std::complex<double>> v(one_magnon.dim(), 0.0);
  for (std::size_t x = 0; x < lattice.num_sites(); ++x) {
    long phase = 0;
    for (int axis = 0; axis < lattice.dim(); ++axis) phase += static_cast<long>(mode[axis]) * lattice.sites()[x][axis];
    phase %= side;
    const double angle = -2.0 * kPi * static_cast<double>(phase) / side;
    v[lowered_index(one_magnon, x)] = norm * std::polar(1.0, angle);
  }

  std::array<double, 3> k{};
  for (int axis = 0; axis < lattice.dim(); ++axis) k[axis] = 2.0 * kPi * mode[axis] / side;
  const double energy = one_magnon.spin().value() * dispersion(std::span<const double>(k.data(), lattice.dim()));
  const double res = residual_norm(build_hamiltonian(one_magnon), v, energy);
  if (res > 1e-10) throw ConsistencyError("spin-wave residual " + std::to_string(res) + " exceeds 1e-10");
  return v;
}

std::vector<NeumannMode> neumann_modes(const SpinSector& one_magnon) {
  require_one_magnon(one_magnon);
  const Lattice& lattice = one_magnon.lattice();
  if (lattice.boundary() != Boundary::Free) throw ConfigError("Neumann modes need a free-boundary lattice");
  const int side = lattice.side();
  const double s = one_magnon.spin().value();
  const SparseOperator h = build_hamiltonian(one_magnon);

  std::vector<std::size_t> index(lattice.num_sites());
  for (std::size_t x = 0; x < lattice.num_sites(); ++x) index[x] = lowered_index(one_magnon, x);

  const MomentumGrid labels(lattice.dim(), side);  // reused only as an enumeration of n
  std::vector<NeumannMode> modes;
  modes.reserve(labels.size());
  for (const Coord& n : labels.modes()) {
    NeumannMode mode;
    mode.quantum_numbers = n;
    double eps = 0.0;
    for (int axis = 0; axis < lattice.dim(); ++axis) {
      const double half = std::sin(0.5 * kPi * n[axis] / side);
      eps += 4.0 * half * half;
    }
    mode.eigenvalue = s * eps;
    mode.vector.assign(one_magnon.dim(), 0.0);
    for (std::size_t x = 0; x < lattice.num_sites(); ++x) {
      double amp = 1.0;
      for (int axis = 0; axis < lattice.dim(); ++axis) {
        const double c = n[axis] == 0 ? std::sqrt(1.0 / side) : std::sqrt(2.0 / side);
        amp *= c * std::cos(kPi * n[axis] * (lattice.sites()[x][axis] + 0.5) / side);
      }
      mode.vector[index[x]] = amp;
    }
    std::vector<double> hv(one_magnon.dim());
    h.apply(mode.vector, hv);
    double res = 0.0;
    for (std::size_t i = 0; i < hv.size(); ++i) res += std::pow(hv[i] - mode.eigenvalue * mode.vector[i], 2);
    if (std::sqrt(res) > 1e-10)
      throw ConsistencyError("Neumann mode residual " + std::to_string(std::sqrt(res)) + " exceeds 1e-10");
    modes.push_back(std::move(mode));
  }
  std::stable_sort(modes.begin(), modes.end(),
                   [](const NeumannMode& a, const NeumannMode& b) { return a.eigenvalue < b.eigenvalue; });

  if (one_magnon.dim() <= 2000) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h.to_dense(), Eigen::EigenvaluesOnly);
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const double diff = std::abs(eig.eigenvalues()(static_cast<Eigen::Index>(i)) - modes[i].eigenvalue);
      if (diff > 1e-10) throw ConsistencyError("Neumann eigenvalue mismatch against dense solve: " + std::to_string(diff));
    }
  }
  return modes;
}

SpinWaveFreeEnergy f0_finite(const Lattice& lattice, SpinValue spin, double beta) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  const MomentumGrid grid = momentum_grid(lattice);
  std::vector<double> terms;
  terms.reserve(grid.size());
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.is_zero(i)) {
      ++excluded;
      continue;
    }
    terms.push_back(log_one_minus_exp(beta * spin.value() * dispersion(grid, i)));
  }
  SpinWaveFreeEnergy out;
  out.beta = beta;
  out.spin = spin;
  out.mode = SpinWaveMode::FiniteGrid;
  out.resolution = lattice.side();
  out.excluded_modes = excluded;
  out.value = pairwise_sum(terms) / (beta * static_cast<double>(grid.size()));
  return out;
}

namespace {

struct Cell {
  std::array<double, 3> lo{};
  double side = 0.0;
  bool corner = false;
  double value = 0.0;
  double error = 0.0;
};

struct ByError {
  bool operator()(const Cell& a, const Cell& b) const { return a.error < b.error; }
};

// Tensor Gauss-Legendre of ln(1 − e^{−aε}) over one cube, at two orders.
void integrate_cell(Cell& cell, double a, int order) {
  const double vol = cell.side * cell.side * cell.side;
  double eps_min = 0.0;
  for (double l : cell.lo) eps_min += sin_sq_half(l);
  const double x_min = a * eps_min;
  if (x_min > 50.0) {
    cell.value = 0.0;
    cell.error = vol * std::exp(-x_min) / (1.0 - std::exp(-x_min));
    return;
  }
  auto tensor = [&](int p) {
    const GaussRule& rule = gauss_legendre(p);
    const std::size_t m = rule.nodes.size();
    std::array<std::vector<double>, 3> eps_axis;
    for (int axis = 0; axis < 3; ++axis) {
      eps_axis[axis].resize(m);
      for (std::size_t i = 0; i < m; ++i)
        eps_axis[axis][i] = sin_sq_half(cell.lo[axis] + 0.5 * cell.side * (rule.nodes[i] + 1.0));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double acc_j = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double acc_k = 0.0;
        const double eij = eps_axis[0][i] + eps_axis[1][j];
        for (std::size_t k = 0; k < m; ++k) acc_k += rule.weights[k] * log_one_minus_exp(a * (eij + eps_axis[2][k]));
        acc_j += rule.weights[j] * acc_k;
      }
      acc += rule.weights[i] * acc_j;
    }
    return acc * vol / 8.0;
  };
  const double low = tensor(order);
  const double high = tensor(next_gauss_order(order));
  cell.value = high;
  cell.error = std::abs(high - low);
}

// |ln(1 − e^{−x})| ≤ −ln x + x with (4/π²)|k|² ≤ ε ≤ |k|² on [0,π]³; integrate the
// majorant over the octant ball containing the corner cube.
void bound_corner(Cell& cell, double a) {
  const double r2 = 3.0 * cell.side * cell.side;
  const double b = 4.0 * a / (kPi * kPi);
  cell.value = 0.0;
  if (b * r2 >= 1.0) {
    cell.error = std::numeric_limits<double>::infinity();
    return;
  }
  const double r = std::sqrt(r2);
  const double r3 = r2 * r;
  cell.error = 0.5 * kPi * (-std::log(b) * r3 / 3.0 - 2.0 * (r3 * std::log(r) / 3.0 - r3 / 9.0) + a * r3 * r2 / 5.0);
}

}  // namespace

BoundedValue spin_wave_integral(double beta_s, const QuadratureOptions& options) {
  if (!(beta_s > 0.0) || !std::isfinite(beta_s)) throw ConfigError("beta*S must be positive and finite");
  gauss_legendre(options.order);
  next_gauss_order(options.order);

  std::priority_queue<Cell, std::vector<Cell>, ByError> queue;
  Cell root;
  root.side = kPi;
  root.corner = true;
  bound_corner(root, beta_s);
  queue.push(root);
  std::size_t evaluated = 1;

  double total = root.value;
  double total_error = root.error;
  auto recompute = [&] {
    // Running sums drift; refresh from the queue contents in a fixed order.
    std::vector<Cell> cells;
    auto copy = queue;
    while (!copy.empty()) {
      cells.push_back(copy.top());
      copy.pop();
    }
    std::sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) {
      return std::tie(x.side, x.lo, x.corner) < std::tie(y.side, y.lo, y.corner);
    });
    std::vector<double> values;
    std::vector<double> errors;
    for (const auto& c : cells) {
      values.push_back(c.value);
      errors.push_back(c.error);
    }
    total = pairwise_sum(values);
    total_error = pairwise_sum(errors);
  };

  while (true) {
    if (std::isfinite(total_error) && total_error <= options.tolerance * std::abs(total)) {
      recompute();
      if (total_error <= options.tolerance * std::abs(total)) break;
    }
    if (evaluated >= options.max_cells) {
      recompute();
      constexpr double kScale = 8.0 / (8.0 * kPi * kPi * kPi);
      throw QuadratureError("spin-wave quadrature: tolerance " + std::to_string(options.tolerance) +
                                " not reached within " + std::to_string(options.max_cells) +
                                " cells; achieved relative bound " + std::to_string(total_error / std::abs(total)),
                            kScale * total, kScale * total_error);
    }
    Cell worst = queue.top();
    queue.pop();
    const bool unbounded = !std::isfinite(worst.error);  // only the corner cell can be
    total -= worst.value;
    total_error -= worst.error;
    const double half = 0.5 * worst.side;
    for (int o = 0; o < 8; ++o) {
      Cell child;
      child.side = half;
      child.lo = {worst.lo[0] + half * (o >> 2 & 1), worst.lo[1] + half * (o >> 1 & 1), worst.lo[2] + half * (o & 1)};
      if (worst.corner && o == 0) {
        child.corner = true;
        bound_corner(child, beta_s);
      } else {
        integrate_cell(child, beta_s, options.order);
      }
      ++evaluated;
      total += child.value;
      total_error += child.error;
      queue.push(child);
    }
    if (unbounded || !std::isfinite(total_error)) recompute();
  }
  // Octant symmetry and the (2π)^{-3} measure.
  constexpr double kScale = 8.0 / (8.0 * kPi * kPi * kPi);
  return {kScale * total, kScale * total_error};
}

SpinWaveFreeEnergy f0_limit(double beta, SpinValue spin, const QuadratureOptions& options) {
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  const BoundedValue integral = spin_wave_integral(beta * spin.value(), options);
  SpinWaveFreeEnergy out;
  out.beta = beta;
  out.spin = spin;
  out.mode = SpinWaveMode::Quadrature;
  out.resolution = options.order;
  out.value = integral.value / beta;
  out.error_bound = integral.error_bound / beta;
  return out;
}

namespace {

// ∫_0^∞ r² ln(1 − e^{−r²}) dr on geometric panels toward r = 0 and unit
// half-panels out to R; corner and tail are bounded analytically.
BoundedValue radial_c0_integral() {
  constexpr int kLow = 20;
  constexpr int kHigh = 25;
  constexpr int kLevels = 60;
  constexpr double kOuter = 9.0;

  auto integrand = [](double r) { return r * r * log_one_minus_exp(r * r); };
  auto panel = [&](double lo, double hi, int order) {
    const GaussRule& rule = gauss_legendre(order);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * integrand(lo + 0.5 * (hi - lo) * (rule.nodes[i] + 1.0));
    return 0.5 * (hi - lo) * acc;
  };

  std::vector<std::pair<double, double>> panels;
  for (int j = kLevels - 1; j >= 0; --j) panels.emplace_back(std::ldexp(1.0, -(j + 1)), std::ldexp(1.0, -j));
  for (double lo = 1.0; lo < kOuter; lo += 0.5) panels.emplace_back(lo, lo + 0.5);

  std::vector<double> values;
  std::vector<double> errors;
  for (const auto& [lo, hi] : panels) {
    const double high = panel(lo, hi, kHigh);
    values.push_back(high);
    errors.push_back(std::abs(high - panel(lo, hi, kLow)));
  }
  const double c = std::ldexp(1.0, -kLevels);
  const double corner = -2.0 * (c * c * c * std::log(c) / 3.0 - c * c * c / 9.0) + std::pow(c, 5) / 5.0;
  const double tail = (kOuter * std::exp(-kOuter * kOuter) / 2.0 + std::sqrt(kPi) / 4.0 * std::erfc(kOuter)) /
                      (1.0 - std::exp(-kOuter * kOuter));
  errors.push_back(corner + tail);
  return {pairwise_sum(values), pairwise_sum(errors)};
}

}  // namespace

C0Estimate c0_constant(double tolerance) {
  if (!(tolerance >= 1e-10)) throw ConfigError("c0 tolerance must be >= 1e-10");
  C0Estimate out;
  const BoundedValue radial = radial_c0_integral();
  // (2π)^{-3} · 4π = 1/(2π²)
  const double measure = 1.0 / (2.0 * kPi * kPi);
  out.quadrature = {measure * radial.value, measure * radial.error_bound + 1e-15};

  const BoundedValue zeta = zeta_five_halves(tolerance);
  const double denom = 8.0 * std::pow(kPi, 1.5);
  out.closed_form = {-zeta.value / denom, zeta.error_bound / denom};
  out.value = out.closed_form.value;

  const double gap = std::abs(out.quadrature.value - out.closed_form.value);
  if (gap > tolerance || out.quadrature.error_bound > tolerance || out.closed_form.error_bound > tolerance)
    throw ConsistencyError("C0 routes disagree: quadrature " + std::to_string(out.quadrature.value) + " vs zeta " +
                           std::to_string(out.closed_form.value));
  return out;
}

std::vector<ScalingRow> scaling_check(SpinValue spin, std::span<const double> beta_grid,
                                      const QuadratureOptions& options) {
  for (std::size_t i = 1; i < beta_grid.size(); ++i)
    if (!(beta_grid[i] > beta_grid[i - 1])) throw ConfigError("beta grid must be increasing");
  const double c0 = c0_constant(1e-10).value;
  std::vector<ScalingRow> rows;
  for (double beta : beta_grid) {
    ScalingRow row;
    row.beta = beta;
    row.spin = spin.value();
    row.f0 = f0_limit(beta, spin, options).value;
    row.rescaled = std::pow(spin.value(), 1.5) * std::pow(beta, 2.5) * row.f0;
    row.deviation = std::abs(row.rescaled - c0) / std::abs(c0);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hfm
