#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hfm {

enum class Boundary { Free, Periodic };

using Coord = std::array<int, 3>;
using Bond = std::pair<std::size_t, std::size_t>;

/// Hypercubic box of side L in 1..3 dimensions with nearest-neighbour bonds.
///
/// Sites are ordered lexicographically by coordinate (first axis slowest);
/// unused axes carry coordinate 0. Bonds are stored as (i, j) with i < j and
/// sorted. Free edges have no ghost sites, so the one-magnon block of the
/// spin Hamiltonian is the Neumann Laplacian of the box.
class Lattice {
 public:
  Lattice(int dim, int side, Boundary boundary);

  int dim() const noexcept { return dim_; }
  int side() const noexcept { return side_; }
  Boundary boundary() const noexcept { return boundary_; }
  std::size_t num_sites() const noexcept { return sites_.size(); }
  const std::vector<Coord>& sites() const noexcept { return sites_; }
  const std::vector<Bond>& bonds() const noexcept { return bonds_; }

  std::size_t index_of(const Coord& c) const;

  /// Squared Euclidean distance; minimum image along periodic axes.
  int distance_squared(std::size_t a, std::size_t b) const;

  /// Canonical spec string, e.g. "d=3,L=2,bc=free".
  std::string spec() const;

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.dim_ == b.dim_ && a.side_ == b.side_ && a.boundary_ == b.boundary_;
  }

 private:
  int dim_;
  int side_;
  Boundary boundary_;
  std::vector<Coord> sites_;
  std::vector<Bond> bonds_;
};

Lattice build_lattice(int dim, int side, Boundary boundary);

/// Parses "d=<1..3>,L=<side>,bc=<free|periodic>" (keys in any order; bc
/// defaults to free, d to 3). Throws ConfigError on anything else.
Lattice parse_lattice(std::string_view text);

/// Momenta k = (2π/L)·n stored as integer vectors n with n_i in [0, L).
class MomentumGrid {
 public:
  MomentumGrid(int dim, int side);

  int dim() const noexcept { return dim_; }
  int side() const noexcept { return side_; }
  std::size_t size() const noexcept { return modes_.size(); }
  const std::vector<Coord>& modes() const noexcept { return modes_; }
  bool is_zero(std::size_t i) const;
  std::size_t zero_index() const noexcept { return 0; }
  std::array<double, 3> momentum(std::size_t i) const;

 private:
  int dim_;
  int side_;
  std::vector<Coord> modes_;
};

MomentumGrid momentum_grid(const Lattice& lattice);

}  // namespace hfm
