#include "hfm/holstein_primakoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hfm/errors.hpp"
#include "hfm/exact_diag.hpp"
#include "hfm/parallel.hpp"

namespace hfm {

FockBasis::FockBasis(Lattice lattice, SpinValue spin, int cutoff, std::optional<long> total_n, std::size_t cap)
    : lattice_(std::move(lattice)),
      spin_(make_spin(spin.two_s)),
      cutoff_(cutoff),
      total_n_(total_n),
      configs_(lattice_.num_sites(), cutoff, total_n, cap) {
  if (cutoff < spin_.two_s) throw ConfigError("Fock cutoff must be at least 2S");
}

FockBasis build_fock_basis(const Lattice& lattice, SpinValue spin, std::optional<long> total_n) {
  return FockBasis(lattice, spin, spin.two_s, total_n);
}

FockBasis build_uncapped_basis(const Lattice& lattice, SpinValue spin, int n_max, std::optional<long> total_n) {
  if (n_max <= spin.two_s) throw ConfigError("uncapped basis needs n_max > 2S");
  return FockBasis(lattice, spin, n_max, total_n);
}

long total_particles(int two_total_sz, SpinValue spin, std::size_t num_sites) {
  return (two_total_sz + spin.two_s * static_cast<long>(num_sites)) / 2;
}

HpCorrespondence hp_correspondence(const SpinSector& sector) {
  std::optional<long> total_n;
  if (sector.two_total_sz()) total_n = total_particles(*sector.two_total_sz(), sector.spin(), sector.num_sites());
  FockBasis fock = build_fock_basis(sector.lattice(), sector.spin(), total_n);
  auto map = hp_correspondence(sector, fock);
  return {std::move(fock), std::move(map)};
}

std::vector<std::size_t> hp_correspondence(const SpinSector& sector, const FockBasis& fock) {
  if (!(sector.lattice() == fock.lattice())) throw ConfigError("spin sector and Fock basis live on different lattices");
  if (!(sector.spin() == fock.spin())) throw ConfigError("spin sector and Fock basis have different S");
  if (!fock.hard_core()) throw ConfigError("the correspondence needs the hard-core Fock basis");
  std::optional<long> expected;
  if (sector.two_total_sz()) expected = total_particles(*sector.two_total_sz(), sector.spin(), sector.num_sites());
  if (expected != fock.total_n()) throw ConfigError("S3_T sector does not match the Fock particle number");
  if (sector.dim() != fock.dim()) throw ConfigError("sector and Fock block differ in dimension");
  std::vector<std::size_t> map(sector.dim());
  for (std::size_t i = 0; i < sector.dim(); ++i) {
    // digit m_x + S is the occupation n_x
    const auto j = fock.index_of(sector.digits(i));
    if (!j) throw ConfigError("spin configuration has no Fock image");
    map[i] = *j;
  }
  return map;
}

SparseOperator build_h0(const FockBasis& fock) {
  const double s = fock.spin().value();
  const int cutoff = fock.cutoff();
  const auto& configs = fock.configurations();
  std::vector<std::vector<SparseOperator::Entry>> rows(fock.dim());
  parallel_for(fock.dim(), [&](std::size_t i) {
    const auto n = configs.digits(i);
    auto& row = rows[i];
    double diag = 0.0;
    for (const auto& [x, y] : fock.lattice().bonds()) {
      diag += s * (n[x] + n[y]);
      // −S (a†_x a_y + a†_y a_x)
      for (const auto& [to, from] : {Bond{x, y}, Bond{y, x}}) {
        if (n[from] == 0 || n[to] >= cutoff) continue;
        const DigitChange change[] = {{to, +1}, {from, -1}};
        if (auto j = configs.find_modified(i, change))
          row.emplace_back(*j, -s * std::sqrt(static_cast<double>((n[to] + 1) * n[from])));
      }
    }
    row.emplace_back(i, diag);
  });
  return SparseOperator::from_rows(std::move(rows));
}

SparseOperator build_k_oriented(const FockBasis& fock, bool reversed) {
  if (!fock.hard_core()) throw ConfigError("K is defined on the hard-core space only");
  const int two_s = fock.spin().two_s;
  const auto& configs = fock.configurations();
  auto root = [two_s](int n) { return std::sqrt(1.0 - static_cast<double>(n) / two_s); };
  std::vector<std::vector<SparseOperator::Entry>> rows(fock.dim());
  // Row i holds ⟨i|K|j⟩; build column-wise by acting on |j⟩ and transpose at the end.
  parallel_for(fock.dim(), [&](std::size_t j) {
    const auto n = configs.digits(j);
    auto& col = rows[j];
    double diag = 0.0;
    for (const auto& bond : fock.lattice().bonds()) {
      const std::size_t x = reversed ? bond.second : bond.first;
      const std::size_t y = reversed ? bond.first : bond.second;
      diag -= static_cast<double>(n[x] * n[y]);
      // a_y, then the bracket on the intermediate occupations, then a†_x (zero at n_x = 2S)
      if (n[y] == 0 || n[x] >= two_s) continue;
      const double bracket = 1.0 - root(n[x]) * root(n[y] - 1);
      if (bracket == 0.0) continue;
      const DigitChange change[] = {{x, +1}, {y, -1}};
      if (auto i = configs.find_modified(j, change))
        col.emplace_back(*i, two_s * bracket * std::sqrt(static_cast<double>(n[y] * (n[x] + 1))));
    }
    col.emplace_back(j, diag);
  });
  return SparseOperator::from_rows(std::move(rows)).transpose();
}

SparseOperator build_k(const FockBasis& fock) {
  const SparseOperator literal = build_k_oriented(fock, false);
  return 0.5 * (literal + literal.transpose());
}

BosonicHamiltonian build_bosonic_hamiltonian(const FockBasis& fock) {
  BosonicHamiltonian out{build_h0(fock), build_k(fock), {}};
  out.hb = out.h0 + out.k_int;
  return out;
}

double verify_equivalence(const SpinSector& sector, const FockBasis& fock) {
  hp_correspondence(sector, fock);
  const Spectrum spin_side = full_spectrum(build_hamiltonian(sector));
  const Spectrum boson_side = full_spectrum(build_bosonic_hamiltonian(fock).hb);
  double worst = 0.0;
  for (std::size_t i = 0; i < spin_side.size(); ++i)
    worst = std::max(worst, std::abs(spin_side.eigenvalues[i] - boson_side.eigenvalues[i]));
  if (worst > 1e-8) {
    const std::string block = fock.total_n() ? std::to_string(*fock.total_n()) : std::string("all");
    throw ConsistencyError("spin and boson spectra differ by " + std::to_string(worst) + " in block total_n=" + block);
  }
  return worst;
}

long projection_inequality_check(const FockBasis& uncapped) {
  if (uncapped.hard_core()) throw ConfigError("1 - P vanishes on F_S; use an uncapped basis with n_max > 2S");
  const int two_s = uncapped.spin().two_s;
  long worst = std::numeric_limits<long>::max();
  for (std::size_t i = 0; i < uncapped.dim(); ++i) {
    long pairs = 0;
    bool outside = false;
    for (const auto n : uncapped.occupations(i)) {
      pairs += static_cast<long>(n) * (n - 1);
      outside = outside || n > two_s;
    }
    worst = std::min(worst, pairs - (outside ? 1 : 0));
  }
  return worst;
}

SparseOperator build_interaction_majorant(const FockBasis& fock) {
  std::vector<std::vector<SparseOperator::Entry>> rows(fock.dim());
  for (std::size_t i = 0; i < fock.dim(); ++i) {
    const auto n = fock.occupations(i);
    double d = 0.0;
    for (const auto& [x, y] : fock.lattice().bonds()) {
      const double nx = n[x];
      const double ny = n[y];
      d += 0.5 * (4.0 * nx * ny + nx * (nx - 1.0) + ny * (ny - 1.0));
    }
    rows[i].emplace_back(i, d);
  }
  return SparseOperator::from_rows(std::move(rows));
}

double interaction_bound_check(const FockBasis& fock) {
  const SparseOperator diff = build_interaction_majorant(fock) - build_k(fock);
  return full_spectrum(diff).eigenvalues.front();
}

Eigen::MatrixXd two_particle_density(std::span<const double> psi, const FockBasis& fock) {
  if (psi.size() != fock.dim()) throw ConfigError("state does not match the Fock basis");
  const auto n_sites = static_cast<Eigen::Index>(fock.num_sites());
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(n_sites, n_sites);
  // a†_x a†_y a_x a_y is n_x n_y for x ≠ y and n_x(n_x − 1) for x = y.
  for (std::size_t i = 0; i < fock.dim(); ++i) {
    const double w = psi[i] * psi[i];
    if (w == 0.0) continue;
    const auto n = fock.occupations(i);
    for (Eigen::Index x = 0; x < n_sites; ++x) {
      if (n[x] == 0) continue;
      for (Eigen::Index y = 0; y < n_sites; ++y) rho(x, y) += w * n[x] * (n[y] - (x == y ? 1.0 : 0.0));
    }
  }
  return rho;
}

std::vector<DensityRow> proposition2_survey(const Lattice& lattice, SpinValue spin, long total_n, double e_lo,
                                            double e_hi) {
  const FockBasis fock = build_fock_basis(lattice, spin, total_n);
  const Spectrum spectrum = full_spectrum(build_bosonic_hamiltonian(fock).hb, true);
  const double s3 = std::pow(spin.value(), 3);
  std::vector<DensityRow> rows;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double e = spectrum.eigenvalues[k];
    if (e <= std::max(e_lo, 1e-10) || e > e_hi) continue;
    const Eigen::VectorXd v = spectrum.eigenvectors->col(static_cast<Eigen::Index>(k));
    const Eigen::MatrixXd rho = two_particle_density(std::span<const double>(v.data(), fock.dim()), fock);
    DensityRow row;
    row.energy = e;
    row.rho_inf = rho.maxCoeff();
    row.rho_1 = rho.sum();
    if (row.rho_1 <= 1e-14) continue;
    row.ratio = row.rho_inf * s3 / (e * e * e * row.rho_1);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hfm
