#include "hfm/exact_diag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "hfm/errors.hpp"
#include "hfm/parallel.hpp"

namespace hfm {

Spectrum full_spectrum(const SparseOperator& op, bool with_vectors, std::size_t dense_cap) {
  if (op.dim() > dense_cap)
    throw InfeasibleError("dimension " + std::to_string(op.dim()) + " exceeds the dense cap " +
                          std::to_string(dense_cap) + "; split into S3_T sectors or use lowest_eigenvalue");
  Spectrum out;
  if (op.dim() == 0) return out;
  const Eigen::MatrixXd dense = op.to_dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense, with_vectors ? Eigen::ComputeEigenvectors
                                                                          : Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
  out.eigenvalues.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + eig.eigenvalues().size());
  if (with_vectors) out.eigenvectors = eig.eigenvectors();
  return out;
}

LanczosResult lanczos_lowest(const SparseOperator& op, const LanczosOptions& options) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  if (n == 0) throw ConfigError("empty operator");

  auto project_out = [&](Eigen::VectorXd& v) {
    for (const auto& d : options.deflate) v -= d.dot(v) * d;
  };

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = gauss(rng);
  project_out(v);
  if (v.norm() == 0.0) throw ConfigError("deflation space covers the whole operator");
  v.normalize();

  const auto max_steps = static_cast<Eigen::Index>(
      std::min<std::size_t>(options.max_iterations, static_cast<std::size_t>(n) - options.deflate.size()));
  Eigen::MatrixXd basis(n, std::max<Eigen::Index>(max_steps, 1));
  std::vector<double> alpha;
  std::vector<double> beta;

  LanczosResult best;
  best.value = std::numeric_limits<double>::quiet_NaN();
  best.residual = std::numeric_limits<double>::infinity();

  auto ritz = [&](Eigen::Index m, bool with_vector) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    LanczosResult r;
    r.value = eig.eigenvalues()(0);
    r.iterations = static_cast<std::size_t>(m);
    r.residual = std::abs(beta[static_cast<std::size_t>(m - 1)] * eig.eigenvectors()(m - 1, 0));
    if (with_vector) {
      r.vector = basis.leftCols(m) * eig.eigenvectors().col(0);
      r.vector.normalize();
      r.residual = (op.apply(r.vector) - r.value * r.vector).norm();
    }
    return r;
  };

  for (Eigen::Index j = 0; j < max_steps; ++j) {
    basis.col(j) = v;
    Eigen::VectorXd w = op.apply(v);
    const double a = v.dot(w);
    alpha.push_back(a);
    // Two passes of classical Gram-Schmidt against the whole Krylov basis.
    for (int pass = 0; pass < 2; ++pass) {
      project_out(w);
      w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
    }
    const double b = w.norm();
    beta.push_back(b);
    const bool exhausted = b <= 1e-13 * std::max(1.0, std::abs(a)) || j + 1 == max_steps;
    if (exhausted || (j + 1) % 10 == 0) {
      LanczosResult r = ritz(j + 1, false);
      const double scale = std::max(1.0, std::abs(r.value));
      if (r.residual <= 0.1 * options.tolerance * scale || exhausted) {
        r = ritz(j + 1, true);
        if (r.residual < best.residual) best = r;
        if (r.residual <= options.tolerance * scale) return r;
        if (exhausted) break;
      }
    }
    v = w / b;
  }
  throw ConvergenceError("Lanczos did not converge; best estimate " + std::to_string(best.value) + ", residual " +
                             std::to_string(best.residual),
                         best.value, best.residual);
}

double lowest_eigenvalue(const SparseOperator& op, double tolerance) {
  LanczosOptions options;
  options.tolerance = tolerance;
  return lanczos_lowest(op, options).value;
}

std::size_t SectorSystem::total_dim() const {
  std::size_t total = 0;
  for (const auto& s : spectra) total += s.size();
  return total;
}

SectorSystem diagonalize_sectors(const Lattice& lattice, SpinValue spin, bool with_vectors, std::size_t dense_cap) {
  SectorSystem system{lattice, spin, {}, {}};
  const auto labels = sector_labels(lattice, spin);
  for (int label : labels) system.sectors.push_back(build_sector(lattice, spin, label));
  system.spectra.resize(labels.size());
  parallel_for(labels.size(), [&](std::size_t k) {
    Spectrum s = full_spectrum(build_hamiltonian(system.sectors[k]), with_vectors, dense_cap);
    s.two_total_sz = labels[k];
    system.spectra[k] = std::move(s);
  });
  return system;
}

namespace {

void check_coverage(std::span<const Spectrum> blocks, std::size_t num_sites, SpinValue spin) {
  const double full = std::pow(static_cast<double>(spin.local_dim()), static_cast<double>(num_sites));
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.size();
  if (static_cast<double>(total) != full)
    throw ConfigError("spectra cover " + std::to_string(total) + " states but the Hilbert space has " +
                      std::to_string(static_cast<long long>(full)));
  if (blocks.size() == 1 && !blocks[0].two_total_sz) return;
  std::set<int> labels;
  for (const auto& b : blocks) {
    if (!b.two_total_sz) throw ConfigError("unlabeled block mixed with sector blocks");
    if (!labels.insert(*b.two_total_sz).second) throw ConfigError("sector appears twice");
  }
  const int two_max = spin.two_s * static_cast<int>(num_sites);
  if (labels.size() != static_cast<std::size_t>(two_max + 1)) throw ConfigError("missing S3_T sectors");
}

double ground_energy(std::span<const Spectrum> blocks) {
  double e0 = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks)
    if (!b.eigenvalues.empty()) e0 = std::min(e0, b.eigenvalues.front());
  return e0;
}

}  // namespace

std::vector<std::vector<double>> gibbs_weights(std::span<const Spectrum> blocks, double beta) {
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  const double e0 = ground_energy(blocks);
  std::vector<std::vector<double>> w(blocks.size());
  double z = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    w[b].reserve(blocks[b].size());
    for (double e : blocks[b].eigenvalues) {
      const double shifted = e - e0;
      const double weight = std::isinf(beta) ? (shifted <= 1e-9 ? 1.0 : 0.0) : std::exp(-beta * shifted);
      w[b].push_back(weight);
      z += weight;
    }
  }
  for (auto& block : w)
    for (double& x : block) x /= z;
  return w;
}

ThermalResult free_energy(std::span<const Spectrum> blocks, double beta, std::size_t num_sites, SpinValue spin) {
  if (!(beta > 0.0) || std::isinf(beta)) throw ConfigError("free energy needs a finite beta > 0");
  check_coverage(blocks, num_sites, spin);
  const double e0 = ground_energy(blocks);
  double z = 0.0;
  double ez = 0.0;
  for (const auto& b : blocks) {
    for (double e : b.eigenvalues) {
      const double w = std::exp(-beta * (e - e0));
      z += w;
      ez += e * w;
    }
  }
  ThermalResult r;
  r.beta = beta;
  r.log_partition = -beta * e0 + std::log(z);
  r.free_energy_per_site = -r.log_partition / (beta * static_cast<double>(num_sites));
  r.energy_per_site = ez / z / static_cast<double>(num_sites);
  return r;
}

ThermalResult free_energy(const SectorSystem& system, double beta) {
  return free_energy(system.spectra, beta, system.num_sites(), system.spin);
}

std::vector<std::vector<double>> pair_expectations(const SectorSystem& system, std::size_t x, std::size_t y) {
  std::vector<std::vector<double>> out(system.sectors.size());
  for (std::size_t k = 0; k < system.sectors.size(); ++k) {
    const auto& spec = system.spectra[k];
    if (!spec.eigenvectors) throw ConfigError("two-point functions need eigenvectors");
    const SparseOperator product = build_spin_product(system.sectors[k], x, y);
    const Eigen::MatrixXd applied = product.apply(*spec.eigenvectors);
    out[k].resize(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      out[k][i] = spec.eigenvectors->col(col).dot(applied.col(col));
    }
  }
  return out;
}

double gibbs_average(std::span<const Spectrum> blocks, const std::vector<std::vector<double>>& values, double beta) {
  const auto w = gibbs_weights(blocks, beta);
  double acc = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (std::size_t i = 0; i < w[b].size(); ++i) acc += w[b][i] * values[b][i];
  return acc;
}

double thermal_two_point(const SectorSystem& system, double beta, std::size_t x, std::size_t y) {
  return gibbs_average(system.spectra, pair_expectations(system, x, y), beta);
}

std::vector<double> geometric_grid(double start, double stop, std::size_t points) {
  if (!(start > 0.0) || !(stop >= start) || points == 0) throw ConfigError("geometric grid needs 0 < start <= stop, points >= 1");
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = start;
    return grid;
  }
  const double ratio = std::log(stop / start) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = start * std::exp(ratio * static_cast<double>(i));
  grid.back() = stop;
  return grid;
}

}  // namespace hfm
