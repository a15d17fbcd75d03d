#include "hfm/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "hfm/errors.hpp"

namespace hfm {

namespace {

std::vector<Coord> enumerate_box(int dim, int side) {
  std::vector<Coord> out;
  const int nx = side;
  const int ny = dim >= 2 ? side : 1;
  const int nz = dim >= 3 ? side : 1;
  out.reserve(static_cast<std::size_t>(nx) * ny * nz);
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b)
      for (int c = 0; c < nz; ++c) out.push_back({a, b, c});
  return out;
}

}  // namespace

Lattice::Lattice(int dim, int side, Boundary boundary)
    : dim_(dim), side_(side), boundary_(boundary) {
  if (dim < 1 || dim > 3) throw ConfigError("lattice dimension must be 1, 2 or 3");
  if (side < 1) throw ConfigError("lattice side must be >= 1");
  if (boundary == Boundary::Periodic && side < 3)
    throw ConfigError("periodic boundary requires side >= 3 (smaller sides double bonds)");

  sites_ = enumerate_box(dim, side);
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    for (int axis = 0; axis < dim; ++axis) {
      Coord next = sites_[i];
      next[axis] += 1;
      if (next[axis] == side) {
        if (boundary == Boundary::Free) continue;
        next[axis] = 0;
      }
      const std::size_t j = index_of(next);
      bonds_.emplace_back(std::min(i, j), std::max(i, j));
    }
  }
  std::sort(bonds_.begin(), bonds_.end());
}

std::size_t Lattice::index_of(const Coord& c) const {
  std::size_t idx = 0;
  for (int axis = 0; axis < dim_; ++axis) idx = idx * side_ + static_cast<std::size_t>(c[axis]);
  return idx;
}

int Lattice::distance_squared(std::size_t a, std::size_t b) const {
  int d2 = 0;
  for (int axis = 0; axis < dim_; ++axis) {
    int delta = std::abs(sites_[a][axis] - sites_[b][axis]);
    if (boundary_ == Boundary::Periodic) delta = std::min(delta, side_ - delta);
    d2 += delta * delta;
  }
  return d2;
}

std::string Lattice::spec() const {
  return "d=" + std::to_string(dim_) + ",L=" + std::to_string(side_) +
         ",bc=" + (boundary_ == Boundary::Free ? "free" : "periodic");
}

Lattice build_lattice(int dim, int side, Boundary boundary) { return Lattice(dim, side, boundary); }

Lattice parse_lattice(std::string_view text) {
  int dim = 3;
  int side = -1;
  Boundary bc = Boundary::Free;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError("lattice spec item without '=': " + std::string(item));
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    auto parse_int = [&](int& out) {
      const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
      if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
        throw ConfigError("bad integer in lattice spec: " + std::string(item));
    };
    if (key == "d") {
      parse_int(dim);
    } else if (key == "L") {
      parse_int(side);
    } else if (key == "bc") {
      if (value == "free" || value == "neumann") {
        bc = Boundary::Free;
      } else if (value == "periodic") {
        bc = Boundary::Periodic;
      } else {
        throw ConfigError("unknown boundary condition: " + std::string(value));
      }
    } else {
      throw ConfigError("unknown lattice spec key: " + std::string(key));
    }
  }
  if (side < 0) throw ConfigError("lattice spec must give L");
  return Lattice(dim, side, bc);
}

MomentumGrid::MomentumGrid(int dim, int side) : dim_(dim), side_(side), modes_(enumerate_box(dim, side)) {}

bool MomentumGrid::is_zero(std::size_t i) const {
  const Coord& n = modes_[i];
  return n[0] == 0 && n[1] == 0 && n[2] == 0;
}

std::array<double, 3> MomentumGrid::momentum(std::size_t i) const {
  const double scale = 2.0 * std::numbers::pi / side_;
  return {scale * modes_[i][0], scale * modes_[i][1], scale * modes_[i][2]};
}

MomentumGrid momentum_grid(const Lattice& lattice) { return MomentumGrid(lattice.dim(), lattice.side()); }

}  // namespace hfm
