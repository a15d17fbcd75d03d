#include "hfm/bounds_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "hfm/errors.hpp"
#include "hfm/holstein_primakoff.hpp"
#include "hfm/parallel.hpp"

namespace hfm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::map<int, double> minima_by_total_spin(const SpinSector& sector) {
  std::map<int, double> minima;
  for (const auto& g : decompose_by_total_spin(sector, build_hamiltonian(sector), build_total_spin_squared(sector)))
    minima[g.two_st] = g.energies.front();
  return minima;
}

}  // namespace

SectorMinimaTable proposition1_table(const Lattice& lattice, SpinValue spin) {
  const int two_max = spin.two_s * static_cast<int>(lattice.num_sites());
  const double s = spin.value();
  const double ell2 = static_cast<double>(lattice.side()) * lattice.side();

  const auto reference = minima_by_total_spin(build_sector(lattice, spin, two_max % 2));

  SectorMinimaTable table;
  table.side = lattice.side();
  table.spin = spin;
  table.c_empirical = std::numeric_limits<double>::infinity();
  for (int two_st = two_max; two_st >= 0; two_st -= 2) {
    const auto minima = minima_by_total_spin(build_sector(lattice, spin, two_st));
    const auto it = minima.find(two_st);
    if (it == minima.end()) continue;  // no multiplet with this S_T
    SectorMinimaRow row;
    row.two_st = two_st;
    row.e_min = it->second;
    row.e_min_check = reference.at(two_st);
    row.deficit = 0.5 * (two_max - two_st);
    row.ratio = row.deficit > 0 ? row.e_min * ell2 / (s * row.deficit) : kNaN;
    table.cross_check_deviation = std::max(table.cross_check_deviation, std::abs(row.e_min - row.e_min_check));
    if (row.deficit > 0) table.c_empirical = std::min(table.c_empirical, row.ratio);
    if (!table.rows.empty() && row.e_min < table.rows.back().e_min - 1e-10) table.monotone = false;
    table.rows.push_back(row);
  }
  if (std::abs(table.rows.front().e_min) > 1e-10)
    throw BoundViolation("fully aligned multiplet is not at zero energy");
  if (table.rows.size() > 1 && !(table.c_empirical > 0.0))
    throw BoundViolation("empirical spectral-bound constant is not positive: " + std::to_string(table.c_empirical));
  if (table.rows.size() == 1) table.c_empirical = kNaN;
  return table;
}

std::vector<GapRow> gap_scaling(SpinValue spin, std::span<const int> sides, int dim) {
  std::vector<GapRow> rows;
  const double s = spin.value();
  for (int side : sides) {
    if (side < 2) throw ConfigError("gap scaling needs side >= 2");
    const Lattice lattice(dim, side, Boundary::Free);
    const SpinSector sector = one_magnon_sector(lattice, spin);
    const SparseOperator h = build_hamiltonian(sector);
    GapRow row;
    row.side = side;
    row.analytic = s * 2.0 * (1.0 - std::cos(std::numbers::pi / side));
    if (sector.dim() <= 1500) {
      const Spectrum spec = full_spectrum(h);
      row.gap = *std::find_if(spec.eigenvalues.begin(), spec.eigenvalues.end(), [](double e) { return e > 1e-9; });
    } else {
      // The zero mode is the uniform superposition; deflate it and take the next level.
      const Eigen::VectorXd uniform =
          Eigen::VectorXd::Constant(static_cast<Eigen::Index>(sector.dim()), 1.0 / std::sqrt(sector.dim()));
      const Eigen::VectorXd deflate[] = {uniform};
      LanczosOptions options;
      options.tolerance = 1e-10;
      options.deflate = deflate;
      row.gap = lanczos_lowest(h, options).value;
    }
    row.scaled = row.gap * side * side / s;
    rows.push_back(row);
  }
  return rows;
}

BoundReport trial_state_upper_bound(const Lattice& lattice, SpinValue spin, double beta, std::optional<int> n_max) {
  if (!(beta > 0.0) || std::isinf(beta)) throw ConfigError("trial bound needs a finite beta > 0");
  const std::size_t n_sites = lattice.num_sites();
  const int two_s = spin.two_s;
  const long max_particles = static_cast<long>(two_s) * static_cast<long>(n_sites);
  const int truncation = n_max.value_or(static_cast<int>(max_particles));
  if (truncation < two_s) throw ConfigError("n_max must be at least 2S");

  struct Block {
    Eigen::MatrixXd gibbs;  // P e^{−βH_0} P on the F_S block
    SparseOperator hb;
    double deficit = 0.0;
  };

  // P e^{−βH_0} P restricted to the F_S block with `particles` bosons, from the
  // boson space truncated at `cutoff`.
  auto compressed = [&](long particles, int cutoff, const FockBasis& hard_core) {
    const FockBasis big(lattice, spin, cutoff, particles);
    const Spectrum spec = full_spectrum(build_h0(big), true);
    const Eigen::MatrixXd& v = *spec.eigenvectors;
    Eigen::VectorXd decay(static_cast<Eigen::Index>(spec.size()));
    for (std::size_t k = 0; k < spec.size(); ++k) decay(static_cast<Eigen::Index>(k)) = std::exp(-beta * spec.eigenvalues[k]);
    std::vector<Eigen::Index> keep(hard_core.dim());
    for (std::size_t i = 0; i < hard_core.dim(); ++i) {
      const auto j = big.index_of(hard_core.occupations(i));
      if (!j) throw ConfigError("hard-core state missing from truncated space");
      keep[i] = static_cast<Eigen::Index>(*j);
    }
    Eigen::MatrixXd rows(static_cast<Eigen::Index>(keep.size()), v.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = v.row(keep[i]);
    return Eigen::MatrixXd(rows * decay.asDiagonal() * rows.transpose());
  };

  std::vector<Block> blocks(static_cast<std::size_t>(max_particles + 1));
  double deficit = 0.0;
  parallel_for(blocks.size(), [&](std::size_t b) {
    const long particles = static_cast<long>(b);
    const FockBasis hard_core = build_fock_basis(lattice, spin, particles);
    const int cutoff = static_cast<int>(std::max<long>(two_s, std::min<long>(truncation, particles)));
    blocks[b].gibbs = compressed(particles, cutoff, hard_core);
    blocks[b].hb = build_bosonic_hamiltonian(hard_core).hb;
    if (cutoff < particles) {
      // Certify the truncation: one more level must not change the trace.
      const double trace_next = compressed(particles, cutoff + 1, hard_core).trace();
      const double rel = std::abs(trace_next - blocks[b].gibbs.trace()) / std::abs(trace_next);
      blocks[b].deficit = rel;
      if (rel > 1e-10)
        throw InfeasibleError("n_max=" + std::to_string(truncation) + " leaves tail mass " + std::to_string(rel) +
                              " in block N=" + std::to_string(particles) + "; increase n_max");
    }
  });
  for (const auto& blk : blocks) deficit = std::max(deficit, blk.deficit);

  double z = 0.0;
  for (const auto& blk : blocks) z += blk.gibbs.trace();
  double energy = 0.0;
  double entropy = 0.0;  // Σ γ ln γ
  for (const auto& blk : blocks) {
    const Eigen::MatrixXd gamma = blk.gibbs / z;
    energy += (blk.hb.apply(gamma)).trace();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (gamma + gamma.transpose()), Eigen::EigenvaluesOnly);
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
      const double g = eig.eigenvalues()(k);
      if (g > 0.0) entropy += g * std::log(g);
    }
  }

  const double n = static_cast<double>(n_sites);
  BoundReport report;
  report.beta = beta;
  report.trial_energy = energy / n;
  report.trial_entropy = -entropy / n;
  report.f_trial_upper = (energy + entropy / beta) / n;
  report.f_exact = free_energy(diagonalize_sectors(lattice, spin, false), beta).free_energy_per_site;
  report.f0_reference = f0_finite(lattice, spin, beta).value;
  const double c0 = c0_constant(1e-10).value;
  report.literature_upper = c0 * std::log(2.0) * std::pow(spin.value(), -1.5) * std::pow(beta, -2.5);
  report.slack = report.f_trial_upper - report.f_exact;
  report.truncation_deficit = deficit;
  if (report.slack < -1e-12)
    throw BoundViolation("variational value " + std::to_string(report.f_trial_upper) + " below exact f " +
                         std::to_string(report.f_exact));
  return report;
}

std::vector<LiteratureRow> literature_comparison(std::span<const double> beta_grid, SpinValue spin,
                                                 std::optional<double> preliminary_c,
                                                 const QuadratureOptions& options) {
  const double c0 = c0_constant(1e-10).value;
  const double s = spin.value();
  std::vector<LiteratureRow> rows;
  for (double beta : beta_grid) {
    LiteratureRow row;
    row.beta = beta;
    row.f0 = f0_limit(beta, spin, options).value;
    row.c0_asymptotic = c0 * std::pow(s, -1.5) * std::pow(beta, -2.5);
    row.spin_half_bound = c0 * std::log(2.0) * std::pow(2.0, 1.5) * std::pow(beta, -2.5);
    row.relative_gap = std::abs(row.f0 / row.c0_asymptotic - 1.0);
    row.preliminary = preliminary_c ? -*preliminary_c * s * std::pow(std::log(s * beta) / (s * beta), 2.5) : kNaN;
    rows.push_back(row);
  }
  return rows;
}

double energy_per_site(const SectorSystem& system, double beta) {
  const auto w = gibbs_weights(system.spectra, beta);
  double e = 0.0;
  for (std::size_t b = 0; b < w.size(); ++b)
    for (std::size_t i = 0; i < w[b].size(); ++i) e += w[b][i] * system.spectra[b].eigenvalues[i];
  return e / static_cast<double>(system.num_sites());
}

CorollaryReport corollary_chain_check(const Lattice& lattice, SpinValue spin, std::span<const double> beta_grid) {
  const SectorSystem system = diagonalize_sectors(lattice, spin, true);
  const std::size_t n = lattice.num_sites();
  const double s2 = spin.value() * spin.value();

  std::vector<Bond> pairs;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) pairs.emplace_back(x, y);
  std::vector<std::vector<std::vector<double>>> expectations(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t p) { expectations[p] = pair_expectations(system, pairs[p].first, pairs[p].second); });

  const auto& bonds = lattice.bonds();
  CorollaryReport report;
  report.min_lhs = std::numeric_limits<double>::infinity();
  std::vector<double> previous(pairs.size(), std::numeric_limits<double>::infinity());
  for (double beta : beta_grid) {
    const double e = energy_per_site(system, beta);
    double bond_sum = 0.0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      CorollaryRow row;
      row.beta = beta;
      row.x = pairs[p].first;
      row.y = pairs[p].second;
      row.distance_squared = lattice.distance_squared(row.x, row.y);
      row.lhs = s2 - gibbs_average(system.spectra, expectations[p], beta);
      row.energy = e;
      row.ratio = e > 0.0 ? row.lhs / (row.distance_squared * e) : kNaN;
      if (std::binary_search(bonds.begin(), bonds.end(), pairs[p])) bond_sum += row.lhs;
      report.min_lhs = std::min(report.min_lhs, row.lhs);
      if (std::isfinite(row.ratio)) report.max_ratio = std::max(report.max_ratio, row.ratio);
      if (row.lhs > previous[p] + 1e-12) report.monotone = false;
      previous[p] = row.lhs;
      report.rows.push_back(row);
    }
    report.sum_rule_error = std::max(report.sum_rule_error, std::abs(bond_sum - static_cast<double>(n) * e));
  }
  for (std::size_t p = 0; p < pairs.size(); ++p)
    report.limit_lhs = std::max(report.limit_lhs,
                                s2 - gibbs_average(system.spectra, expectations[p], std::numeric_limits<double>::infinity()));

  if (report.min_lhs < -1e-10) throw BoundViolation("negative two-point deficit " + std::to_string(report.min_lhs));
  if (report.sum_rule_error > 1e-10)
    throw BoundViolation("bond sum of deficits misses <H> by " + std::to_string(report.sum_rule_error));
  if (report.limit_lhs > 1e-10) throw BoundViolation("deficit does not vanish in the ground multiplet");
  return report;
}

}  // namespace hfm
