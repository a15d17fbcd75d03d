#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "hfm/errors.hpp"
#include "hfm/exact_diag.hpp"
#include "oracles.hpp"

using namespace hfm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// f by direct summation over an eigenvalue list, long double, no shifting.
double direct_free_energy(const std::vector<double>& e, double beta, std::size_t n) {
  long double z = 0.0L;
  for (double x : e) z += std::exp(-static_cast<long double>(beta) * x);
  return static_cast<double>(-std::log(z) / (beta * n));
}

}  // namespace

TEST_CASE("two-site free energy closed form") {
  auto pair = build_lattice(1, 2, Boundary::Free);
  auto sys = diagonalize_sectors(pair, make_spin(1), false);
  for (double beta : geometric_grid(0.01, 100.0, 41)) {
    const double exact = -std::log(3.0 + std::exp(-beta)) / (2.0 * beta);
    auto r = free_energy(sys, beta);
    CHECK(std::abs(r.free_energy_per_site - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
    const double e_exact = std::exp(-beta) / (3.0 + std::exp(-beta)) / 2.0;
    CHECK(std::abs(r.energy_per_site - e_exact) < 1e-14);
  }
}

TEST_CASE("high temperature entropy") {
  for (int two_s : {1, 2, 3}) {
    auto sys = diagonalize_sectors(build_lattice(1, 3, Boundary::Periodic), make_spin(two_s), false);
    auto r = free_energy(sys, 1e-9);
    CHECK(r.beta * r.free_energy_per_site == doctest::Approx(-std::log(two_s + 1.0)).epsilon(1e-7));
  }
}

TEST_CASE("sector sum equals the full-space computation") {
  for (auto [lat, two_s] : {std::pair{build_lattice(3, 2, Boundary::Free), 1},
                            std::pair{build_lattice(1, 4, Boundary::Periodic), 2},
                            std::pair{build_lattice(2, 2, Boundary::Free), 3}}) {
    auto sys = diagonalize_sectors(lat, make_spin(two_s), false);
    auto full = full_spectrum(build_hamiltonian(build_sector(lat, make_spin(two_s))));
    const std::vector<Spectrum> one{full};
    for (double beta : {0.1, 1.0, 5.0, 30.0}) {
      const double a = free_energy(sys, beta).free_energy_per_site;
      const double b = free_energy(one, beta, lat.num_sites(), make_spin(two_s)).free_energy_per_site;
      CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
    }
  }
}

TEST_CASE("cube at beta 5 against summation of the exported spectrum") {
  auto cube = build_lattice(3, 2, Boundary::Free);
  auto h = build_hamiltonian(build_sector(cube, make_spin(1)));
  std::stringstream ss;
  h.write_triplets(ss);
  // independent path: re-read the triplets, dense solve with Eigen, direct sum
  auto dense = SparseOperator::read_triplets(ss).to_dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 256);
  CHECK(std::abs(ev.front()) < 1e-12);
  CHECK(std::count_if(ev.begin(), ev.end(), [](double e) { return std::abs(e) < 1e-10; }) == 9);
  auto sys = diagonalize_sectors(cube, make_spin(1), false);
  CHECK(sys.total_dim() == 256);
  const double f = free_energy(sys, 5.0).free_energy_per_site;
  CHECK(f == doctest::Approx(direct_free_energy(ev, 5.0, 8)).epsilon(1e-12));
}

TEST_CASE("free energy requires complete coverage") {
  auto ring = build_lattice(1, 4, Boundary::Periodic);
  auto sys = diagonalize_sectors(ring, make_spin(1), false);
  std::vector<Spectrum> partial(sys.spectra.begin(), sys.spectra.end() - 1);
  CHECK_THROWS_AS(free_energy(partial, 1.0, 4, make_spin(1)), ConfigError);
  std::vector<Spectrum> doubled = sys.spectra;
  doubled.push_back(sys.spectra.front());
  CHECK_THROWS_AS(free_energy(doubled, 1.0, 4, make_spin(1)), ConfigError);
  CHECK_THROWS_AS(free_energy(sys, 0.0), ConfigError);
  CHECK_THROWS_AS(free_energy(sys, -1.0), ConfigError);
}

TEST_CASE("large beta keeps the ground multiplet") {
  auto sys = diagonalize_sectors(build_lattice(1, 4, Boundary::Periodic), make_spin(2), false);
  auto r = free_energy(sys, 1e4);
  CHECK(std::isfinite(r.free_energy_per_site));
  CHECK(r.free_energy_per_site == doctest::Approx(-std::log(9.0) / (4e4)).epsilon(1e-12));
  CHECK(r.energy_per_site >= -1e-15);
}

TEST_CASE("thermodynamic shape on beta grids") {
  for (auto [lat, two_s] : {std::pair{build_lattice(1, 4, Boundary::Periodic), 1},
                            std::pair{build_lattice(2, 2, Boundary::Free), 2},
                            std::pair{build_lattice(3, 2, Boundary::Free), 1}}) {
    auto sys = diagonalize_sectors(lat, make_spin(two_s), false);
    auto grid = geometric_grid(0.05, 50.0, 30);
    double prev_bf = 0.0, prev_e = kInf;
    std::vector<double> bf;
    for (double beta : grid) {
      auto r = free_energy(sys, beta);
      CHECK(r.free_energy_per_site <= 0.0);
      CHECK(r.energy_per_site >= -1e-15);
      CHECK(r.energy_per_site <= prev_e + 1e-15);
      const double value = beta * r.free_energy_per_site;
      // d(βf)/dβ = e ≥ 0
      if (!bf.empty()) CHECK(value >= prev_bf - 1e-15);
      prev_bf = value;
      prev_e = r.energy_per_site;
      bf.push_back(value);
    }
    // concavity of βf on the geometric grid via chord slopes
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      const double left = (bf[i] - bf[i - 1]) / (grid[i] - grid[i - 1]);
      const double right = (bf[i + 1] - bf[i]) / (grid[i + 1] - grid[i]);
      CHECK(right <= left + 1e-12);
    }
  }
}

TEST_CASE("energy is the beta derivative of beta f") {
  auto sys = diagonalize_sectors(build_lattice(3, 2, Boundary::Free), make_spin(1), false);
  const double h = 1e-4;
  for (double beta : {0.2, 0.7, 1.5, 4.0, 10.0}) {
    auto g = [&](double b) { return b * free_energy(sys, b).free_energy_per_site; };
    const double fd = (g(beta + h) - g(beta - h)) / (2 * h);
    const double e = free_energy(sys, beta).energy_per_site;
    CHECK(std::abs(fd - e) <= 1e-6 * e);
  }
}

TEST_CASE("thermal two-point function") {
  auto pair = diagonalize_sectors(build_lattice(1, 2, Boundary::Free), make_spin(1), true);
  CHECK(thermal_two_point(pair, kInf, 0, 1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(std::abs(thermal_two_point(pair, 0.0, 0, 1)) < 1e-14);
  for (double beta : {0.3, 3.0}) {
    const double z = 3.0 + std::exp(-beta);
    CHECK(thermal_two_point(pair, beta, 0, 1) == doctest::Approx((0.75 - 0.75 * std::exp(-beta)) / z).epsilon(1e-13));
  }

  auto ring = build_lattice(1, 4, Boundary::Periodic);
  auto sys = diagonalize_sectors(ring, make_spin(1), true);
  // oracle: Gibbs average with dense Kronecker matrices
  const Eigen::MatrixXd h = oracle::heisenberg(ring, 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::MatrixXd sxy = oracle::dot_product(1, 0, 1, 4);
  auto oracle_avg = [&](double beta) {
    double z = 0, acc = 0;
    for (Eigen::Index i = 0; i < 16; ++i) {
      const double w = std::exp(-beta * es.eigenvalues()(i));
      z += w;
      acc += w * es.eigenvectors().col(i).dot(sxy * es.eigenvectors().col(i));
    }
    return acc / z;
  };
  double prev = -1.0;
  for (double beta : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const double v = thermal_two_point(sys, beta, 0, 1);
    CHECK(v == doctest::Approx(oracle_avg(beta)).epsilon(1e-12));
    CHECK(v > 0.0);
    CHECK(v < 0.25);
    CHECK(v > prev);
    prev = v;
  }
  auto no_vectors = diagonalize_sectors(ring, make_spin(1), false);
  CHECK_THROWS_AS(thermal_two_point(no_vectors, 1.0, 0, 1), ConfigError);
  CHECK_THROWS_AS(thermal_two_point(sys, 1.0, 1, 1), ConfigError);
}

TEST_CASE("two-point deficit is nonnegative") {
  auto cube = build_lattice(3, 2, Boundary::Free);
  auto sys = diagonalize_sectors(cube, make_spin(1), true);
  for (double beta : {0.0, 0.1, 1.0, 10.0, kInf})
    for (std::size_t y = 1; y < 8; ++y) CHECK(0.25 - thermal_two_point(sys, beta, 0, y) >= -1e-10);
}

TEST_CASE("dense spectra carry accurate eigenvectors") {
  auto h = build_hamiltonian(build_sector(build_lattice(2, 2, Boundary::Free), make_spin(2), 0));
  auto spec = full_spectrum(h, true);
  REQUIRE(spec.eigenvectors.has_value());
  CHECK(std::is_sorted(spec.eigenvalues.begin(), spec.eigenvalues.end()));
  const Eigen::MatrixXd& v = *spec.eigenvectors;
  const Eigen::MatrixXd hv = h.apply(v);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double lambda = spec.eigenvalues[i];
    CHECK((hv.col(i) - lambda * v.col(i)).norm() <= 1e-9 * std::max(1.0, std::abs(lambda)));
  }
  CHECK_THROWS_AS(full_spectrum(h, false, 3), InfeasibleError);
}

TEST_CASE("Lanczos lowest eigenvalue") {
  auto pair = build_lattice(1, 2, Boundary::Free);
  CHECK(std::abs(lowest_eigenvalue(build_hamiltonian(build_sector(pair, make_spin(1), 0)))) < 1e-9);

  auto ring = build_lattice(1, 4, Boundary::Periodic);
  auto sec = build_sector(ring, make_spin(1));
  auto groups = decompose_by_total_spin(sec, build_hamiltonian(sec), build_total_spin_squared(sec));
  const auto& singlet = groups.back();
  REQUIRE(singlet.two_st == 0);
  // restrict H to the singlet block and compare the two solvers
  const Eigen::MatrixXd block = singlet.vectors.transpose() * build_hamiltonian(sec).to_dense() * singlet.vectors;
  std::vector<std::vector<SparseOperator::Entry>> rows(block.rows());
  for (Eigen::Index i = 0; i < block.rows(); ++i)
    for (Eigen::Index j = 0; j < block.cols(); ++j) rows[i].push_back({std::size_t(j), block(i, j)});
  auto op = SparseOperator::from_rows(rows, 1e-14);
  CHECK(lowest_eigenvalue(op) == doctest::Approx(full_spectrum(op).eigenvalues.front()).epsilon(1e-9));
  CHECK(lowest_eigenvalue(op) == doctest::Approx(*std::min_element(singlet.energies.begin(), singlet.energies.end())));

  auto top = build_sector(build_lattice(3, 2, Boundary::Free), make_spin(2), 16);
  CHECK(lowest_eigenvalue(build_hamiltonian(top)) == 0.0);

  // a larger degenerate block: 3x3 periodic S=1/2 at S3_T = 1/2
  auto torus = build_sector(build_lattice(2, 3, Boundary::Periodic), make_spin(1), 1);
  auto ht = build_hamiltonian(torus);
  auto lr = lanczos_lowest(ht);
  CHECK(lr.value == doctest::Approx(full_spectrum(ht).eigenvalues.front()).epsilon(1e-9));
  CHECK(lr.residual <= 1e-9 * std::max(1.0, std::abs(lr.value)));
}

TEST_CASE("Lanczos reports non-convergence") {
  auto h = build_hamiltonian(build_sector(build_lattice(2, 3, Boundary::Periodic), make_spin(1), 1));
  LanczosOptions opts;
  opts.max_iterations = 2;
  opts.tolerance = 1e-14;
  try {
    lanczos_lowest(h, opts);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual() > 0.0);
    CHECK(std::isfinite(e.best_estimate()));
  }
}

TEST_CASE("geometric grids") {
  auto g = geometric_grid(0.5, 8.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.5);
  CHECK(g.back() == 8.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(geometric_grid(3.0, 3.0, 1) == std::vector<double>{3.0});
  CHECK_THROWS_AS(geometric_grid(0.0, 1.0, 3), ConfigError);
  CHECK_THROWS_AS(geometric_grid(2.0, 1.0, 3), ConfigError);
}
