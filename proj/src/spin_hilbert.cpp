#include "hfm/spin_hilbert.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string>

#include "hfm/errors.hpp"
#include "hfm/parallel.hpp"

namespace hfm {

namespace {

std::optional<long> digit_sum_for(const Lattice& lattice, SpinValue spin, std::optional<int> two_total_sz) {
  if (!two_total_sz) return std::nullopt;
  const long n = static_cast<long>(lattice.num_sites());
  const long two_max = spin.two_s * n;
  const long tsz = *two_total_sz;
  if (tsz < -two_max || tsz > two_max) throw ConfigError("total S3 outside [-S*N, S*N]");
  if ((tsz + two_max) % 2 != 0) throw ConfigError("total S3 must differ from S*N by an integer");
  return (tsz + two_max) / 2;
}

int parse_int_exact(std::string_view s, std::string_view whole) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw ConfigError("bad spin value: " + std::string(whole));
  return v;
}

}  // namespace

SpinValue make_spin(int two_s) {
  if (two_s < 1 || two_s > kMaxDigit) throw ConfigError("2S must be in 1.." + std::to_string(kMaxDigit));
  return SpinValue{two_s};
}

SpinValue parse_spin(std::string_view text) {
  const std::string_view whole = text;
  if (text.starts_with("2S=")) return make_spin(parse_int_exact(text.substr(3), whole));
  if (text.starts_with("S=")) text.remove_prefix(2);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const int num = parse_int_exact(text.substr(0, slash), whole);
    const int den = parse_int_exact(text.substr(slash + 1), whole);
    if (den == 2) return make_spin(num);
    if (den == 1) return make_spin(2 * num);
    throw ConfigError("spin must be a multiple of 1/2: " + std::string(whole));
  }
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) throw ConfigError("bad spin value: " + std::string(whole));
  const double twice = 2.0 * v;
  if (std::abs(twice - std::round(twice)) > 1e-12) throw ConfigError("spin must be a multiple of 1/2: " + std::string(whole));
  return make_spin(static_cast<int>(std::lround(twice)));
}

SpinSector::SpinSector(Lattice lattice, SpinValue spin, std::optional<int> two_total_sz, std::size_t cap)
    : lattice_(std::move(lattice)),
      spin_(make_spin(spin.two_s)),
      two_total_sz_(two_total_sz),
      configs_(lattice_.num_sites(), spin_.two_s, digit_sum_for(lattice_, spin_, two_total_sz), cap) {}

int SpinSector::two_total_m(std::size_t i) const {
  int total = 0;
  for (const auto d : digits(i)) total += 2 * d - spin_.two_s;
  return total;
}

SpinSector build_sector(const Lattice& lattice, SpinValue spin, std::optional<int> two_total_sz) {
  return SpinSector(lattice, spin, two_total_sz);
}

std::vector<int> sector_labels(const Lattice& lattice, SpinValue spin) {
  const int two_max = spin.two_s * static_cast<int>(lattice.num_sites());
  std::vector<int> labels;
  for (int t = two_max; t >= -two_max; t -= 2) labels.push_back(t);
  return labels;
}

SparseOperator build_exchange(const SpinSector& sector, std::span<const Bond> pairs, double constant, double coupling) {
  const int t = sector.spin().two_s;
  const std::size_t dim = sector.dim();
  const auto& configs = sector.configurations();
  std::vector<std::vector<SparseOperator::Entry>> rows(dim);

  parallel_for(dim, [&](std::size_t i) {
    const auto d = configs.digits(i);
    auto& row = rows[i];
    double diag = 0.0;
    for (const auto& [x, y] : pairs) {
      const int dx = d[x];
      const int dy = d[y];
      diag += constant + coupling * 0.25 * (2 * dx - t) * (2 * dy - t);
      // S+_x S-_y
      if (dx < t && dy > 0) {
        const DigitChange change[] = {{x, +1}, {y, -1}};
        if (auto j = configs.find_modified(i, change)) {
          const double amp = std::sqrt(static_cast<double>((t - dx) * (dx + 1)) * static_cast<double>(dy * (t - dy + 1)));
          row.emplace_back(*j, 0.5 * coupling * amp);
        }
      }
      // S-_x S+_y
      if (dx > 0 && dy < t) {
        const DigitChange change[] = {{x, -1}, {y, +1}};
        if (auto j = configs.find_modified(i, change)) {
          const double amp = std::sqrt(static_cast<double>(dx * (t - dx + 1)) * static_cast<double>((t - dy) * (dy + 1)));
          row.emplace_back(*j, 0.5 * coupling * amp);
        }
      }
    }
    row.emplace_back(i, diag);
  });
  return SparseOperator::from_rows(std::move(rows));
}

SparseOperator build_hamiltonian(const SpinSector& sector) {
  const double s = sector.spin().value();
  return build_exchange(sector, sector.lattice().bonds(), s * s, -1.0);
}

SparseOperator build_total_spin_squared(const SpinSector& sector) {
  const std::size_t n = sector.num_sites();
  std::vector<Bond> pairs;
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) pairs.emplace_back(x, y);
  const double s = sector.spin().value();
  SparseOperator cross = build_exchange(sector, pairs, 0.0, 2.0);
  std::vector<std::vector<SparseOperator::Entry>> diag(sector.dim());
  for (std::size_t i = 0; i < sector.dim(); ++i) diag[i].emplace_back(i, static_cast<double>(n) * s * (s + 1.0));
  return cross + SparseOperator::from_rows(std::move(diag));
}

SparseOperator build_spin_product(const SpinSector& sector, std::size_t x, std::size_t y) {
  if (x == y || x >= sector.num_sites() || y >= sector.num_sites()) throw ConfigError("spin product needs two distinct sites");
  const Bond pair[] = {{x, y}};
  return build_exchange(sector, pair, 0.0, 1.0);
}

std::vector<TotalSpinGroup> decompose_by_total_spin(const SpinSector& sector, const SparseOperator& hamiltonian,
                                                    const SparseOperator& total_spin_squared) {
  constexpr double kCommutatorTol = 1e-10;
  constexpr double kClusterTol = 1e-8;
  constexpr double kLabelTol = 1e-8;
  if (hamiltonian.dim() != sector.dim() || total_spin_squared.dim() != sector.dim())
    throw ConfigError("operators do not match the sector dimension");
  const double comm = commutator_max_entry(hamiltonian, total_spin_squared);
  if (comm > kCommutatorTol)
    throw ConsistencyError("H and S_T^2 do not commute: max |[H,S^2]_ij| = " + std::to_string(comm));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hamiltonian.to_dense());
  const Eigen::VectorXd& evals = eig.eigenvalues();
  const Eigen::MatrixXd& evecs = eig.eigenvectors();
  const Eigen::Index n = evals.size();

  struct Labeled {
    int two_st;
    double energy;
    Eigen::VectorXd vec;
  };
  std::map<int, std::vector<Labeled>, std::greater<>> by_spin;

  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index stop = start + 1;
    while (stop < n && evals(stop) - evals(stop - 1) <= kClusterTol) ++stop;
    const Eigen::MatrixXd block = evecs.middleCols(start, stop - start);
    const Eigen::MatrixXd projected = block.transpose() * total_spin_squared.apply(block);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> inner(0.5 * (projected + projected.transpose()));
    const Eigen::MatrixXd rotated = block * inner.eigenvectors();
    for (Eigen::Index k = 0; k < inner.eigenvalues().size(); ++k) {
      const double lambda = std::max(0.0, inner.eigenvalues()(k));
      const double st = 0.5 * (std::sqrt(1.0 + 4.0 * lambda) - 1.0);
      const int two_st = static_cast<int>(std::lround(2.0 * st));
      const double exact = 0.25 * two_st * (two_st + 2);
      if (std::abs(lambda - exact) > kLabelTol)
        throw ConsistencyError("S_T^2 eigenvalue " + std::to_string(lambda) + " is not of the form S_T(S_T+1)");
      // Rayleigh quotient restores the H eigenvalue after the in-cluster rotation.
      const Eigen::VectorXd v = rotated.col(k);
      by_spin[two_st].push_back({two_st, v.dot(hamiltonian.apply(v)), v});
    }
    start = stop;
  }

  std::vector<TotalSpinGroup> groups;
  for (auto& [two_st, members] : by_spin) {
    std::stable_sort(members.begin(), members.end(), [](const Labeled& a, const Labeled& b) { return a.energy < b.energy; });
    TotalSpinGroup g;
    g.two_st = two_st;
    g.vectors.resize(static_cast<Eigen::Index>(sector.dim()), static_cast<Eigen::Index>(members.size()));
    for (std::size_t k = 0; k < members.size(); ++k) {
      g.energies.push_back(members[k].energy);
      g.vectors.col(static_cast<Eigen::Index>(k)) = members[k].vec;
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

bool polarized_two_point_check(const SpinSector& sector) {
  constexpr double kTol = 1e-12;
  const double s = sector.spin().value();
  const int two_max = sector.spin().two_s * static_cast<int>(sector.num_sites());
  const auto groups = decompose_by_total_spin(sector, build_hamiltonian(sector), build_total_spin_squared(sector));
  const auto top = std::find_if(groups.begin(), groups.end(), [&](const TotalSpinGroup& g) { return g.two_st == two_max; });
  if (top == groups.end()) return false;
  for (const auto& [x, y] : sector.lattice().bonds()) {
    const SparseOperator product = build_spin_product(sector, x, y);
    const Eigen::MatrixXd applied = product.apply(top->vectors);
    for (Eigen::Index k = 0; k < top->vectors.cols(); ++k) {
      if (std::abs(top->vectors.col(k).dot(applied.col(k)) - s * s) > kTol) return false;
    }
  }
  return true;
}

}  // namespace hfm
