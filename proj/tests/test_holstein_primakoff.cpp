#include <doctest.h>

#include <cmath>

#include "hfm/errors.hpp"
#include "hfm/exact_diag.hpp"
#include "hfm/holstein_primakoff.hpp"
#include "oracles.hpp"

using namespace hfm;

namespace {

double max_entry(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

std::vector<std::pair<Lattice, int>> small_cases() {
  return {{build_lattice(1, 2, Boundary::Free), 1},     {build_lattice(1, 2, Boundary::Free), 2},
          {build_lattice(1, 4, Boundary::Periodic), 1}, {build_lattice(1, 4, Boundary::Periodic), 2},
          {build_lattice(2, 2, Boundary::Free), 1},     {build_lattice(1, 3, Boundary::Periodic), 3},
          {build_lattice(1, 4, Boundary::Free), 2}};
}

}  // namespace

TEST_CASE("occupations mirror magnetic quantum numbers") {
  auto site = build_lattice(1, 1, Boundary::Free);
  auto sec = build_sector(site, make_spin(1), -1);
  auto map = hp_correspondence(sec);
  CHECK(map.fock.occupations(map.spin_to_fock[0])[0] == 0);

  auto cube = build_lattice(3, 2, Boundary::Free);
  auto top = hp_correspondence(build_sector(cube, make_spin(2), 16));
  for (auto n : top.fock.occupations(0)) CHECK(n == 2);
  auto bottom = hp_correspondence(build_sector(cube, make_spin(2), -16));
  for (auto n : bottom.fock.occupations(0)) CHECK(n == 0);

  auto pair = build_lattice(1, 2, Boundary::Free);
  CHECK(total_particles(0, make_spin(2), 2) == 2);
  CHECK(*hp_correspondence(build_sector(pair, make_spin(2), 0)).fock.total_n() == 2);

  // every spin state maps to the Fock state with identical digits
  auto ring = build_lattice(1, 4, Boundary::Periodic);
  auto s = build_sector(ring, make_spin(3), 2);
  auto c = hp_correspondence(s);
  for (std::size_t i = 0; i < s.dim(); ++i) {
    auto a = s.digits(i);
    auto b = c.fock.occupations(c.spin_to_fock[i]);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
  }
}

TEST_CASE("mismatched correspondences are rejected") {
  auto ring = build_lattice(1, 4, Boundary::Periodic);
  auto sec = build_sector(ring, make_spin(1), 0);
  CHECK_THROWS_AS(hp_correspondence(sec, build_fock_basis(ring, make_spin(1), 3)), ConfigError);
  CHECK_THROWS_AS(hp_correspondence(sec, build_fock_basis(ring, make_spin(2), 2)), ConfigError);
  CHECK_THROWS_AS(hp_correspondence(sec, build_fock_basis(build_lattice(1, 4, Boundary::Free), make_spin(1), 2)),
                  ConfigError);
  CHECK_THROWS_AS(hp_correspondence(sec, build_uncapped_basis(ring, make_spin(1), 3, 2)), ConfigError);
}

TEST_CASE("Fock dimensions") {
  auto ring = build_lattice(1, 4, Boundary::Periodic);
  CHECK(build_fock_basis(ring, make_spin(2)).dim() == 81);
  CHECK(build_fock_basis(ring, make_spin(2)).hard_core());
  CHECK(build_uncapped_basis(ring, make_spin(1), 4).dim() == 625);
  CHECK_FALSE(build_uncapped_basis(ring, make_spin(1), 4).hard_core());
  CHECK_THROWS_AS(build_uncapped_basis(ring, make_spin(2), 2), ConfigError);
}

TEST_CASE("hopping part H0") {
  auto ring = build_lattice(1, 4, Boundary::Periodic);
  for (int two_s : {1, 2}) {
    auto one = full_spectrum(build_h0(build_fock_basis(ring, make_spin(two_s), 1)));
    const double s = 0.5 * two_s;
    const std::vector<double> expect{0, 2 * s, 2 * s, 4 * s};
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(one.eigenvalues[i] - expect[i]) < 1e-12);
  }
  auto vacuum = build_h0(build_fock_basis(ring, make_spin(1), 0));
  CHECK(vacuum.dim() == 1);
  CHECK(vacuum.at(0, 0) == 0.0);

  auto pair = build_lattice(1, 2, Boundary::Free);
  auto both = build_fock_basis(pair, make_spin(1), 2);
  REQUIRE(both.dim() == 1);
  CHECK(build_h0(both).at(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("interaction K hand values") {
  auto pair = build_lattice(1, 2, Boundary::Free);
  auto both = build_fock_basis(pair, make_spin(1), 2);
  CHECK(build_k(both).at(0, 0) == doctest::Approx(-1.0));

  for (auto [lat, two_s] : small_cases())
    for (long n : {0L, 1L}) {
      auto k = build_k(build_fock_basis(lat, make_spin(two_s), n));
      CHECK(k.max_abs() == 0.0);
    }

  // S=1 pair, |2,0⟩ → |1,1⟩ hop: 2S·√2·(1 − √(1/2)·1) from the literal term, halved by symmetrization
  auto s1 = build_fock_basis(pair, make_spin(2), 2);
  const hfm::Digit a[] = {2, 0}, b[] = {1, 1};
  const auto i = *s1.index_of(a), j = *s1.index_of(b);
  const auto lit = build_k_oriented(s1, false);
  const double forward = lit.at(i, j), backward = lit.at(j, i);
  // ⟨2,0| a†_0 [..] a_1 |1,1⟩ : bracket at occupations (1,0)
  CHECK(forward == doctest::Approx(2.0 * std::sqrt(2.0) * (1.0 - std::sqrt(0.5))));
  // ⟨1,1| a†_0 [..] a_1 |0,2⟩ would be the reverse move; |2,0⟩ → |1,1⟩ needs a†_1 a_0, absent in this orientation
  CHECK(backward == 0.0);
  CHECK(build_k(s1).at(i, j) == doctest::Approx(0.5 * forward));
}

TEST_CASE("H0 and K equal the operator-product construction entrywise") {
  for (auto [lat, two_s] : small_cases()) {
    CAPTURE(lat.spec());
    CAPTURE(two_s);
    auto fock = build_fock_basis(lat, make_spin(two_s));
    auto ref = oracle::boson_hamiltonian(lat, two_s, two_s);
    CHECK(max_entry(build_h0(fock).to_dense() - ref.h0) < 1e-13);
    CHECK(max_entry(build_k(fock).to_dense() - ref.k) < 1e-13);
  }
  // H0 on a truncated unconstrained space
  auto ring = build_lattice(1, 3, Boundary::Periodic);
  CHECK(max_entry(build_h0(build_uncapped_basis(ring, make_spin(1), 3)).to_dense() -
                  oracle::boson_hamiltonian(ring, 1, 3).h0) < 1e-13);
}

TEST_CASE("Hermitian part of the bond transcription") {
  for (auto [lat, two_s] : small_cases()) {
    auto fock = build_fock_basis(lat, make_spin(two_s));
    const auto fwd = build_k_oriented(fock, false);
    const auto rev = build_k_oriented(fock, true);
    const auto herm_f = 0.5 * (fwd + fwd.transpose());
    const auto herm_r = 0.5 * (rev + rev.transpose());
    CHECK((herm_f - herm_r).max_abs() < 1e-14);
    CHECK(build_k(fock).asymmetry() == 0.0);
    // the Hermitian part makes H0 + K the spin Hamiltonian itself
    const auto spin = build_hamiltonian(build_sector(lat, make_spin(two_s)));
    CHECK((build_h0(fock) + build_k(fock) - spin).max_abs() < 1e-13);
  }
  // the transcription alone is not symmetric once hops survive the hard core
  auto pair = build_fock_basis(build_lattice(1, 2, Boundary::Free), make_spin(2));
  CHECK(build_k_oriented(pair, false).asymmetry() > 0.1);
}

TEST_CASE("spectral equivalence of spin and boson pictures") {
  auto pair = build_lattice(1, 2, Boundary::Free);
  for (int label : sector_labels(pair, make_spin(1))) {
    auto sec = build_sector(pair, make_spin(1), label);
    CHECK(verify_equivalence(sec, hp_correspondence(sec).fock) < 1e-12);
  }
  auto ring = build_lattice(1, 4, Boundary::Periodic);
  auto two = build_sector(ring, make_spin(2), -4);  // N_tot = S3_T + SN = 2
  CHECK(*hp_correspondence(two).fock.total_n() == 2);
  CHECK(verify_equivalence(two, hp_correspondence(two).fock) < 1e-10);
  // one-particle block: spectrum S × Laplacian
  auto one = build_sector(ring, make_spin(1), -2);
  auto fock1 = hp_correspondence(one).fock;
  CHECK(verify_equivalence(one, fock1) < 1e-12);
  auto spec = full_spectrum(build_bosonic_hamiltonian(fock1).hb);
  const std::vector<double> expect{0, 1, 1, 2};
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(spec.eigenvalues[i] - expect[i]) < 1e-12);
}

TEST_CASE("particle number is conserved and H0 is positive") {
  for (auto [lat, two_s] : small_cases()) {
    auto fock = build_fock_basis(lat, make_spin(two_s));
    std::vector<std::vector<SparseOperator::Entry>> rows(fock.dim());
    for (std::size_t i = 0; i < fock.dim(); ++i) {
      double n = 0;
      for (auto v : fock.occupations(i)) n += v;
      rows[i].push_back({i, n});
    }
    const auto number = SparseOperator::from_rows(rows);
    auto bh = build_bosonic_hamiltonian(fock);
    CHECK(commutator_max_entry(bh.h0, number) < 1e-12);
    CHECK(commutator_max_entry(bh.k_int, number) < 1e-12);
    CHECK(full_spectrum(bh.h0).eigenvalues.front() >= -1e-12);
    CHECK(bh.hb.asymmetry() < 1e-14);
  }
}

TEST_CASE("projection inequality") {
  auto ring = build_lattice(1, 4, Boundary::Periodic);
  // hard-core-looking states: both sides zero
  auto low = build_uncapped_basis(ring, make_spin(2), 3, 1);
  CHECK(projection_inequality_check(low) == 0);
  auto site = build_lattice(1, 1, Boundary::Free);
  CHECK(projection_inequality_check(build_uncapped_basis(site, make_spin(1), 2, 2)) == 1);

  for (int two_s : {1, 2, 3}) {
    auto uncapped = build_uncapped_basis(ring, make_spin(two_s), 4);
    const long got = projection_inequality_check(uncapped);
    CHECK(got >= 0);
    // exhaustive scan of all 5^4 occupation vectors
    long worst = 1 << 20;
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; b <= 4; ++b)
        for (int c = 0; c <= 4; ++c)
          for (int d = 0; d <= 4; ++d) {
            const int occ[] = {a, b, c, d};
            long lhs = 0;
            bool out = false;
            for (int n : occ) {
              lhs += n * (n - 1);
              out = out || n > two_s;
            }
            worst = std::min(worst, lhs - (out ? 1L : 0L));
          }
    CHECK(got == worst);
  }
  CHECK_THROWS_AS(projection_inequality_check(build_fock_basis(ring, make_spin(1))), ConfigError);
}

TEST_CASE("interaction bound") {
  auto ring = build_lattice(1, 4, Boundary::Periodic);
  auto one = build_fock_basis(ring, make_spin(1), 1);
  auto one_spec = full_spectrum(build_interaction_majorant(one) - build_k(one));
  for (double e : one_spec.eigenvalues) CHECK(e == 0.0);

  auto pair = build_fock_basis(build_lattice(1, 2, Boundary::Free), make_spin(1), 2);
  CHECK(build_interaction_majorant(pair).at(0, 0) == doctest::Approx(2.0));
  CHECK(interaction_bound_check(pair) == doctest::Approx(3.0));

  auto chain = build_lattice(1, 4, Boundary::Free);
  for (long n = 0; n <= 4; ++n) {
    auto block = build_fock_basis(chain, make_spin(2), n);
    const double got = interaction_bound_check(block);
    CHECK(got >= -1e-10);
    // dense oracle on the whole hard-core space, restricted to the block by the index map
    auto ref = oracle::boson_hamiltonian(chain, 2, 2);
    auto full = build_fock_basis(chain, make_spin(2));
    Eigen::MatrixXd sub(block.dim(), block.dim());
    std::vector<std::size_t> idx(block.dim());
    for (std::size_t i = 0; i < block.dim(); ++i) idx[i] = *full.index_of(block.occupations(i));
    const Eigen::MatrixXd major = build_interaction_majorant(full).to_dense() - ref.k;
    for (std::size_t i = 0; i < block.dim(); ++i)
      for (std::size_t j = 0; j < block.dim(); ++j) sub(i, j) = major(idx[i], idx[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
    CHECK(got == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-10));
  }
}

TEST_CASE("two-particle density") {
  auto ring = build_lattice(1, 4, Boundary::Periodic);
  auto one = build_fock_basis(ring, make_spin(1), 1);
  const std::vector<double> psi(4, 0.5);
  CHECK(two_particle_density(psi, one).cwiseAbs().maxCoeff() == 0.0);

  auto pair = build_fock_basis(build_lattice(1, 2, Boundary::Free), make_spin(1), 2);
  const std::vector<double> single{1.0};
  auto rho = two_particle_density(single, pair);
  CHECK(rho(0, 1) == 1.0);
  CHECK(rho(1, 0) == 1.0);
  CHECK(rho(0, 0) == 0.0);
  CHECK(rho(1, 1) == 0.0);

  // ground state of H_B in a two-particle block, contracted with explicit ladder matrices
  for (int two_s : {1, 2}) {
    auto block = build_fock_basis(ring, make_spin(two_s), 2);
    auto spec = full_spectrum(build_bosonic_hamiltonian(block).hb, true);
    for (std::size_t k : {std::size_t{0}, spec.size() - 1}) {
      const Eigen::VectorXd v = spec.eigenvectors->col(k);
      auto got = two_particle_density(std::span<const double>(v.data(), v.size()), block);
      auto full = build_fock_basis(ring, make_spin(two_s));
      Eigen::VectorXd big = Eigen::VectorXd::Zero(full.dim());
      for (std::size_t i = 0; i < block.dim(); ++i) big(*full.index_of(block.occupations(i))) = v(i);
      const Eigen::MatrixXd a = oracle::annihilator(two_s);
      for (std::size_t x = 0; x < 4; ++x)
        for (std::size_t y = 0; y < 4; ++y) {
          const Eigen::MatrixXd ax = oracle::embed(a, x, 4), ay = oracle::embed(a, y, 4);
          const double ref = big.dot(ax.transpose() * ay.transpose() * ax * ay * big);
          CHECK(std::abs(got(x, y) - ref) < 1e-12);
        }
      CHECK((got - got.transpose()).cwiseAbs().maxCoeff() < 1e-14);
      CHECK(got.minCoeff() >= -1e-14);
      CHECK(got.sum() == doctest::Approx(2.0).epsilon(1e-10));  // ⟨N(N−1)⟩ = 2
    }
  }
}

TEST_CASE("density survey") {
  auto ring = build_lattice(1, 4, Boundary::Periodic);
  CHECK(proposition2_survey(ring, make_spin(1), 1, 0.0, 100.0).empty());
  for (int two_s : {1, 2}) {
    for (auto bc : {Boundary::Periodic, Boundary::Free}) {
      auto rows = proposition2_survey(build_lattice(1, 4, bc), make_spin(two_s), 2, 0.0, 100.0);
      CHECK_FALSE(rows.empty());
      const double s3 = std::pow(0.5 * two_s, 3);
      for (const auto& r : rows) {
        CHECK(r.energy > 0.0);
        CHECK(std::isfinite(r.ratio));
        CHECK(r.ratio > 0.0);
        CHECK(r.rho_1 == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(r.ratio == doctest::Approx(r.rho_inf * s3 / (std::pow(r.energy, 3) * r.rho_1)));
      }
    }
  }
}
