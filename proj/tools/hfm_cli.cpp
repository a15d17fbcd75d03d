// hfm: command-line front end for the Heisenberg ferromagnet laboratory.
//
// Every subcommand parses and validates its whole configuration first, then
// computes, then writes <name>.csv, <name>.dat (gnuplot columns) and
// <name>.manifest.json into --output. Exit codes: 1 usage, 2 bad config,
// 3 infeasible size, 4 numerical failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "hfm/bounds_lab.hpp"
#include "hfm/errors.hpp"
#include "hfm/exact_diag.hpp"
#include "hfm/holstein_primakoff.hpp"
#include "hfm/lattice.hpp"
#include "hfm/parallel.hpp"
#include "hfm/spin_hilbert.hpp"
#include "hfm/spin_wave.hpp"
#include "hfm/table.hpp"

#ifndef HFM_VERSION
#define HFM_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hfm;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

constexpr const char* kLatticeHelp = "lattice string d=<1..3>,L=<side>,bc=<free|periodic>";
constexpr const char* kSpinHelp = "spin as 2S=<k>, S=<p/q> or a decimal";
constexpr const char* kBetaHelp = "beta grid: geom:<start>:<stop>:<points> or a comma list (inf allowed where noted)";

std::vector<double> parse_beta_grid(const std::string& text, bool allow_zero_and_inf) {
  std::vector<double> out;
  auto number = [&](const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "infinity") {
      if (!allow_zero_and_inf) throw ConfigError("beta = inf is not accepted by this command");
      return std::numeric_limits<double>::infinity();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("cannot parse beta value '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ConfigError("cannot parse beta value '" + s + "'");
    if (v < 0.0 || (v == 0.0 && !allow_zero_and_inf)) throw ConfigError("beta must be positive, got '" + s + "'");
    return v;
  };
  if (text.rfind("geom:", 0) == 0) {
    std::vector<std::string> parts;
    std::stringstream ss(text.substr(5));
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ConfigError("geometric grid needs geom:start:stop:points");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    long points = 0;
    try {
      std::size_t used = 0;
      points = std::stol(parts[2], &used);
      if (used != parts[2].size()) throw ConfigError("");
    } catch (const std::exception&) {
      throw ConfigError("cannot parse point count '" + parts[2] + "'");
    }
    if (points < 1) throw ConfigError("grid needs at least one point");
    if (!std::isfinite(stop) || !(start > 0.0)) throw ConfigError("geometric grid needs finite positive endpoints");
    return geometric_grid(start, stop, static_cast<std::size_t>(points));
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  if (out.empty()) throw ConfigError("empty beta grid");
  return out;
}

std::optional<int> parse_sector(const std::string& text) {
  if (text.empty() || text == "all") return std::nullopt;
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("sector must be an integer 2*S3_T or 'all', got '" + text + "'");
}

json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

json grid_json(const std::vector<double>& grid) {
  json out = json::array();
  for (double b : grid) out.push_back(number_or_string(b));
  return out;
}

/// Collects outputs of one run and writes them with the manifest.
class Run {
 public:
  Run(std::string command, fs::path dir, std::vector<std::string> argv)
      : command_(std::move(command)), dir_(std::move(dir)), argv_(std::move(argv)),
        start_(std::chrono::steady_clock::now()) {}

  json inputs = json::object();
  json tolerances = json::object();
  json results = json::object();

  void table(const std::string& stem, const Table& t, std::optional<std::pair<std::size_t, std::size_t>> plot) {
    tables_.push_back({stem, t, plot});
  }
  void text(const std::string& name, std::string content) { texts_.emplace_back(name, std::move(content)); }

  void finish() {
    fs::create_directories(dir_);
    json outputs = json::array();
    for (const auto& [stem, t, plot] : tables_) {
      write(stem + ".csv", [&](std::ostream& os) { t.write_csv(os); });
      outputs.push_back(stem + ".csv");
      if (plot) {
        write(stem + ".dat", [&](std::ostream& os) { t.write_columns(os, plot->first, plot->second); });
        outputs.push_back(stem + ".dat");
      }
    }
    for (const auto& [name, content] : texts_) {
      write(name, [&](std::ostream& os) { os << content; });
      outputs.push_back(name);
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json manifest{{"schema", 1},
                  {"tool", "hfm"},
                  {"version", HFM_VERSION},
                  {"command", command_},
                  {"argv", argv_},
                  {"inputs", inputs},
                  {"tolerances", tolerances},
                  {"results", results},
                  {"threads", thread_count()},
                  {"outputs", outputs},
                  {"wall_time_seconds", wall}};
    write(command_manifest_name(), [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
  }

 private:
  struct Pending {
    std::string stem;
    Table table;
    std::optional<std::pair<std::size_t, std::size_t>> plot;
  };

  std::string command_manifest_name() const {
    std::string name = command_;
    for (char& c : name)
      if (c == '-') c = '_';
    return name + ".manifest.json";
  }

  template <class F>
  void write(const std::string& name, F&& body) {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + (dir_ / name).string());
    body(os);
  }

  std::string command_;
  fs::path dir_;
  std::vector<std::string> argv_;
  std::chrono::steady_clock::time_point start_;
  std::vector<Pending> tables_;
  std::vector<std::pair<std::string, std::string>> texts_;
};

struct Options {
  std::string lattice;
  std::string spin;
  std::string beta;
  std::string output = ".";
  std::string sector = "all";
  double tol = 1e-10;
  int order = 15;
  std::size_t max_cells = QuadratureOptions{}.max_cells;
  std::size_t threads = 0;
  std::size_t x = 0;
  std::size_t y = 1;
  int n_max = 4;
  long max_particles = 4;
  long total_n = 2;
  double e_lo = 0.0;
  double e_hi = std::numeric_limits<double>::infinity();
  int dim = 3;
  std::vector<int> sides{2, 4, 6, 8, 10};
  std::optional<int> trial_n_max;
  std::optional<double> preliminary_c;
  std::string manifest;
  std::string lattice_option;
};

QuadratureOptions quadrature(const Options& o) {
  QuadratureOptions q;
  q.order = o.order;
  q.tolerance = o.tol;
  q.max_cells = o.max_cells;
  gauss_legendre(q.order);  // validates the order up front
  if (!(o.tol > 0.0)) throw ConfigError("--tol must be positive");
  return q;
}

void put_lattice(Run& run, const Lattice& lat, SpinValue spin) {
  run.inputs["lattice"] = lat.spec();
  run.inputs["spin_2S"] = spin.two_s;
}

// ---- subcommands ---------------------------------------------------------

void cmd_spectrum(const Options& o, Run& run) {
  const Lattice lat = parse_lattice(o.lattice);
  const SpinValue spin = parse_spin(o.spin);
  const auto sector = parse_sector(o.sector);
  if (sector) build_sector(lat, spin, sector);  // validates the label before any work
  put_lattice(run, lat, spin);
  run.inputs["sector"] = sector ? json(*sector) : json("all");

  std::vector<double> eig;
  if (sector) {
    eig = full_spectrum(build_hamiltonian(build_sector(lat, spin, sector))).eigenvalues;
  } else {
    for (const auto& s : diagonalize_sectors(lat, spin, false).spectra)
      eig.insert(eig.end(), s.eigenvalues.begin(), s.eigenvalues.end());
    std::sort(eig.begin(), eig.end());
  }
  std::string csv, txt;
  for (std::size_t i = 0; i < eig.size(); ++i) {
    csv += (i ? "," : "") + format_number(eig[i]);
    txt += format_number(eig[i]) + "\n";
  }
  run.text("spectrum.csv", csv + "\n");
  run.text("spectrum.txt", txt);
  Table levels{"", {"index", "energy"}, {}};
  for (std::size_t i = 0; i < eig.size(); ++i) levels.add_row({static_cast<long long>(i), eig[i]});
  run.text("spectrum.dat", [&] {
    std::ostringstream os;
    levels.write_columns(os, 0, 1);
    return os.str();
  }());
  run.results["dimension"] = eig.size();
  run.results["ground_energy"] = eig.front();
  std::cout << "dimension " << eig.size() << ", lowest " << format_number(eig.front()) << ", highest "
            << format_number(eig.back()) << "\n";
}

void cmd_free_energy(const Options& o, Run& run) {
  const Lattice lat = parse_lattice(o.lattice);
  const SpinValue spin = parse_spin(o.spin);
  const auto grid = parse_beta_grid(o.beta, false);
  put_lattice(run, lat, spin);
  run.inputs["beta"] = grid_json(grid);

  const auto system = diagonalize_sectors(lat, spin, false);
  Table t{"", {"beta", "f", "e", "beta_power_check"}, {}};
  for (double beta : grid) {
    const auto r = free_energy(system, beta);
    const double check = std::pow(spin.value(), 1.5) * std::pow(beta, 2.5) * r.free_energy_per_site;
    t.add_row({beta, r.free_energy_per_site, r.energy_per_site, check});
  }
  run.table("free_energy", t, std::pair{0, 1});
  std::cout << "wrote " << grid.size() << " rows\n";
}

void cmd_two_point(const Options& o, Run& run) {
  const Lattice lat = parse_lattice(o.lattice);
  const SpinValue spin = parse_spin(o.spin);
  const auto grid = parse_beta_grid(o.beta, true);
  if (o.x >= lat.num_sites() || o.y >= lat.num_sites() || o.x == o.y)
    throw ConfigError("sites --x and --y must be distinct and inside the lattice");
  put_lattice(run, lat, spin);
  run.inputs["beta"] = grid_json(grid);
  run.inputs["x"] = o.x;
  run.inputs["y"] = o.y;

  const auto system = diagonalize_sectors(lat, spin, true);
  const double s2 = spin.value() * spin.value();
  Table t{"", {"beta", "x", "y", "two_point", "deficit"}, {}};
  for (double beta : grid) {
    const double v = thermal_two_point(system, beta, o.x, o.y);
    t.add_row({beta, static_cast<long long>(o.x), static_cast<long long>(o.y), v, s2 - v});
  }
  run.table("two_point", t, std::pair{0, 3});
  std::cout << "wrote " << grid.size() << " rows\n";
}

void cmd_sw_dispersion(const Options& o, Run& run) {
  const Lattice lat = parse_lattice(o.lattice);
  const SpinValue spin = parse_spin(o.spin);
  put_lattice(run, lat, spin);
  const auto one = one_magnon_sector(lat, spin);
  Table t{"", {"n1", "n2", "n3", "eps", "energy"}, {}};
  if (lat.boundary() == Boundary::Periodic) {
    const auto grid = momentum_grid(lat);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      spin_wave_state(one, grid.modes()[i]);  // residual-checked eigenvector
      const double eps = dispersion(grid, i);
      const auto& n = grid.modes()[i];
      t.add_row({static_cast<long long>(n[0]), static_cast<long long>(n[1]), static_cast<long long>(n[2]), eps,
                 spin.value() * eps});
    }
    run.results["boundary"] = "periodic";
  } else {
    for (const auto& m : neumann_modes(one)) {
      const auto& n = m.quantum_numbers;
      t.add_row({static_cast<long long>(n[0]), static_cast<long long>(n[1]), static_cast<long long>(n[2]),
                 m.eigenvalue / spin.value(), m.eigenvalue});
    }
    run.results["boundary"] = "free";
  }
  run.table("sw_dispersion", t, std::pair{3, 4});
  std::cout << t.rows.size() << " one-magnon modes verified\n";
}

void cmd_sw_free_energy(const Options& o, Run& run) {
  const SpinValue spin = parse_spin(o.spin);
  const auto grid = parse_beta_grid(o.beta, false);
  const auto q = quadrature(o);
  std::optional<Lattice> lat;
  if (!o.lattice_option.empty()) lat = parse_lattice(o.lattice_option);
  run.inputs["spin_2S"] = spin.two_s;
  run.inputs["beta"] = grid_json(grid);
  if (lat) run.inputs["lattice"] = lat->spec();
  run.tolerances["quadrature_relative"] = q.tolerance;
  run.tolerances["gauss_order"] = q.order;
  run.tolerances["max_cells"] = q.max_cells;

  Table t{"", {"beta", "S", "f0_limit", "error_bound", "f0_finite"}, {}};
  for (double beta : grid) {
    const auto lim = f0_limit(beta, spin, q);
    const double fin = lat ? f0_finite(*lat, spin, beta).value : std::numeric_limits<double>::quiet_NaN();
    t.add_row({beta, spin.value(), lim.value, lim.error_bound, fin});
  }
  run.table("sw_free_energy", t, std::pair{0, 2});
  std::cout << "wrote " << grid.size() << " rows\n";
}

void cmd_c0(const Options& o, Run& run) {
  if (!(o.tol >= 1e-10)) throw ConfigError("--tol for c0 must be >= 1e-10");
  run.tolerances["agreement"] = o.tol;
  const auto c = c0_constant(o.tol);
  Table t{"", {"route", "value", "error_bound"}, {}};
  t.add_row({std::string("quadrature"), c.quadrature.value, c.quadrature.error_bound});
  t.add_row({std::string("zeta_series"), c.closed_form.value, c.closed_form.error_bound});
  run.table("c0", t, std::nullopt);
  const double bound = std::max(c.quadrature.error_bound, c.closed_form.error_bound) +
                       std::abs(c.quadrature.value - c.closed_form.value);
  run.results["C0"] = c.value;
  run.results["error_bound"] = bound;
  std::cout << "C0 = " << format_number(c.value) << " +/- " << format_number(bound) << "\n";
}

void cmd_scaling(const Options& o, Run& run) {
  const SpinValue spin = parse_spin(o.spin);
  const auto grid = parse_beta_grid(o.beta, false);
  const auto q = quadrature(o);
  run.inputs["spin_2S"] = spin.two_s;
  run.inputs["beta"] = grid_json(grid);
  run.tolerances["quadrature_relative"] = q.tolerance;
  run.tolerances["gauss_order"] = q.order;
  run.tolerances["max_cells"] = q.max_cells;
  Table t{"", {"beta", "S", "f0", "rescaled", "deviation"}, {}};
  for (const auto& r : scaling_check(spin, grid, q)) t.add_row({r.beta, r.spin, r.f0, r.rescaled, r.deviation});
  run.table("scaling", t, std::pair{0, 3});
  std::cout << "wrote " << grid.size() << " rows\n";
}

void cmd_hp_verify(const Options& o, Run& run) {
  const Lattice lat = parse_lattice(o.lattice);
  const SpinValue spin = parse_spin(o.spin);
  put_lattice(run, lat, spin);
  run.tolerances["max_deviation"] = 1e-8;
  Table t{"", {"two_sz", "total_n", "dim", "max_deviation"}, {}};
  double worst = 0.0;
  for (int label : sector_labels(lat, spin)) {
    const auto sector = build_sector(lat, spin, label);
    const auto map = hp_correspondence(sector);
    const double d = verify_equivalence(sector, map.fock);
    worst = std::max(worst, d);
    t.add_row({static_cast<long long>(label), static_cast<long long>(*map.fock.total_n()),
               static_cast<long long>(sector.dim()), d});
  }
  run.table("hp_verify", t, std::pair{1, 3});
  run.results["max_deviation"] = worst;
  std::cout << "max_deviation = " << format_number(worst) << " < 1e-8\n";
}

void cmd_inequalities(const Options& o, Run& run) {
  const Lattice lat = parse_lattice(o.lattice);
  const SpinValue spin = parse_spin(o.spin);
  if (o.n_max <= spin.two_s) throw ConfigError("--n-max must exceed 2S");
  if (o.max_particles < 0) throw ConfigError("--max-particles must be nonnegative");
  put_lattice(run, lat, spin);
  run.inputs["n_max"] = o.n_max;
  run.inputs["max_particles"] = o.max_particles;
  run.tolerances["interaction_bound"] = 1e-10;

  Table t{"operator_inequalities", {"check", "total_n", "dim", "min_eigenvalue"}, {}};
  const auto uncapped = build_uncapped_basis(lat, spin, o.n_max);
  const long proj = projection_inequality_check(uncapped);
  t.add_row({std::string("projection"), std::string("all"), static_cast<long long>(uncapped.dim()),
             static_cast<long long>(proj)});
  double worst = std::numeric_limits<double>::infinity();
  const long top = std::min<long>(o.max_particles, static_cast<long>(spin.two_s) * lat.num_sites());
  for (long n = 0; n <= top; ++n) {
    const auto block = build_fock_basis(lat, spin, n);
    const double v = interaction_bound_check(block);
    worst = std::min(worst, v);
    t.add_row({std::string("interaction"), static_cast<long long>(n), static_cast<long long>(block.dim()), v});
  }
  run.table("inequalities", t, std::nullopt);
  run.results["projection_min"] = proj;
  run.results["interaction_min"] = worst;
  std::cout << "projection min " << proj << ", interaction min " << format_number(worst) << "\n";
  if (proj < 0) throw BoundViolation("projection inequality violated");
  if (worst < -1e-10) throw BoundViolation("interaction bound violated");
}

void cmd_density(const Options& o, Run& run) {
  const Lattice lat = parse_lattice(o.lattice);
  const SpinValue spin = parse_spin(o.spin);
  if (o.total_n < 0) throw ConfigError("--total-n must be nonnegative");
  put_lattice(run, lat, spin);
  run.inputs["total_n"] = o.total_n;
  run.inputs["energy_window"] = {o.e_lo, number_or_string(o.e_hi)};
  Table t{"", {"E", "rho_inf", "rho_1", "ratio"}, {}};
  double max_ratio = 0.0;
  for (const auto& r : proposition2_survey(lat, spin, o.total_n, o.e_lo, o.e_hi)) {
    t.add_row({r.energy, r.rho_inf, r.rho_1, r.ratio});
    max_ratio = std::max(max_ratio, r.ratio);
  }
  run.table("density_survey", t, std::pair{0, 3});
  run.results["max_ratio"] = max_ratio;
  std::cout << t.rows.size() << " states, max ratio " << format_number(max_ratio) << "\n";
}

void cmd_prop1(const Options& o, Run& run) {
  const Lattice lat = parse_lattice(o.lattice);
  const SpinValue spin = parse_spin(o.spin);
  put_lattice(run, lat, spin);
  const auto tab = proposition1_table(lat, spin);
  Table t{"sector_minima", {"S_T", "E_min", "E_min_check", "deficit", "ratio"}, {}};
  for (const auto& r : tab.rows) t.add_row({0.5 * r.two_st, r.e_min, r.e_min_check, r.deficit, r.ratio});
  run.table("sector_minima", t, std::pair{0, 1});
  run.results["c_empirical"] = tab.c_empirical;
  run.results["monotone"] = tab.monotone;
  std::cout << "empirical constant " << fmt::format("{:.3g}", tab.c_empirical) << (tab.monotone ? "" : " (E_min not monotone in S_T)")
            << "\n";
}

void cmd_gap(const Options& o, Run& run) {
  const SpinValue spin = parse_spin(o.spin);
  if (o.dim < 1 || o.dim > 3) throw ConfigError("--dim must be 1, 2 or 3");
  for (int side : o.sides)
    if (side < 2) throw ConfigError("--sides entries must be >= 2");
  run.inputs["spin_2S"] = spin.two_s;
  run.inputs["dim"] = o.dim;
  run.inputs["sides"] = o.sides;
  Table t{"one_magnon_gap", {"L", "gap", "analytic", "scaled"}, {}};
  for (const auto& r : gap_scaling(spin, o.sides, o.dim))
    t.add_row({static_cast<long long>(r.side), r.gap, r.analytic, r.scaled});
  run.table("gap", t, std::pair{0, 3});
  std::cout << "wrote " << t.rows.size() << " rows\n";
}

void cmd_trial_bound(const Options& o, Run& run) {
  const Lattice lat = parse_lattice(o.lattice);
  const SpinValue spin = parse_spin(o.spin);
  const auto grid = parse_beta_grid(o.beta, false);
  if (o.trial_n_max && *o.trial_n_max < spin.two_s) throw ConfigError("--n-max must be at least 2S");
  put_lattice(run, lat, spin);
  run.inputs["beta"] = grid_json(grid);
  if (o.trial_n_max) run.inputs["n_max"] = *o.trial_n_max;
  run.tolerances["slack"] = -1e-12;
  Table t{"variational_bound",
          {"beta", "f_exact", "f_trial", "trial_energy", "trial_entropy", "f0_reference", "literature_upper", "slack",
           "truncation_deficit"},
          {}};
  double min_slack = std::numeric_limits<double>::infinity();
  for (double beta : grid) {
    const auto r = trial_state_upper_bound(lat, spin, beta, o.trial_n_max);
    min_slack = std::min(min_slack, r.slack);
    t.add_row({r.beta, r.f_exact, r.f_trial_upper, r.trial_energy, r.trial_entropy, r.f0_reference,
               r.literature_upper, r.slack, r.truncation_deficit});
  }
  run.table("trial_bound", t, std::pair{0, 7});
  run.results["min_slack"] = min_slack;
  std::cout << "min slack " << format_number(min_slack) << "\n";
}

void cmd_compare(const Options& o, Run& run) {
  const SpinValue spin = parse_spin(o.spin);
  const auto grid = parse_beta_grid(o.beta, false);
  const auto q = quadrature(o);
  run.inputs["spin_2S"] = spin.two_s;
  run.inputs["beta"] = grid_json(grid);
  if (o.preliminary_c) run.inputs["preliminary_c"] = *o.preliminary_c;
  run.tolerances["quadrature_relative"] = q.tolerance;
  Table t{"literature_comparison", {"beta", "f0", "c0_asymptotic", "spin_half_bound", "relative_gap", "preliminary"}, {}};
  for (const auto& r : literature_comparison(grid, spin, o.preliminary_c, q))
    t.add_row({r.beta, r.f0, r.c0_asymptotic, r.spin_half_bound, r.relative_gap, r.preliminary});
  run.table("compare", t, std::pair{0, 4});
  std::cout << "wrote " << grid.size() << " rows\n";
}

void cmd_corollary(const Options& o, Run& run) {
  const Lattice lat = parse_lattice(o.lattice);
  const SpinValue spin = parse_spin(o.spin);
  const auto grid = parse_beta_grid(o.beta, true);
  put_lattice(run, lat, spin);
  run.inputs["beta"] = grid_json(grid);
  run.tolerances["sum_rule"] = 1e-10;
  const auto rep = corollary_chain_check(lat, spin, grid);
  Table t{"two_point_deficit", {"beta", "x", "y", "dist2", "lhs", "e", "ratio"}, {}};
  for (const auto& r : rep.rows)
    t.add_row({r.beta, static_cast<long long>(r.x), static_cast<long long>(r.y),
               static_cast<long long>(r.distance_squared), r.lhs, r.energy, r.ratio});
  run.table("corollary", t, std::nullopt);
  run.results["max_ratio"] = rep.max_ratio;
  run.results["sum_rule_error"] = rep.sum_rule_error;
  run.results["monotone"] = rep.monotone;
  std::cout << "max ratio " << format_number(rep.max_ratio) << ", sum-rule error "
            << format_number(rep.sum_rule_error) << "\n";
}

int execute(const std::vector<std::string>& args, int depth);

int replay(const Options& o, const std::vector<std::string>& override_output, int depth) {
  if (depth > 0) throw ConfigError("a manifest cannot replay another manifest");
  std::ifstream is(o.manifest);
  if (!is) throw ConfigError("cannot read manifest " + o.manifest);
  json m;
  try {
    m = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (m.value("schema", 0) != 1) throw ConfigError("unsupported manifest schema");
  if (!m.contains("argv") || !m["argv"].is_array()) throw ConfigError("manifest has no argv");
  std::vector<std::string> args = m["argv"].get<std::vector<std::string>>();
  args.insert(args.end(), override_output.begin(), override_output.end());
  return execute(args, depth + 1);
}

int execute(const std::vector<std::string>& args, int depth) {
  CLI::App app{"Heisenberg ferromagnet laboratory: exact diagonalization, spin waves, bosonic representation and "
               "bound checks"};
  app.set_version_flag("--version", HFM_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("-o,--output", o.output, "output directory")
      ->capture_default_str()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.add_option("--threads", o.threads, "worker cap (default: HFM_THREADS or all cores)");
  app.add_option("--tol", o.tol, "tolerance (relative quadrature error; c0 route agreement)")->capture_default_str();
  app.add_option("--max-cells", o.max_cells, "quadrature cell budget")->capture_default_str();
  app.add_option("--order", o.order, "Gauss-Legendre order per cell: 7, 10, 15, 20, 25 or 30")->capture_default_str();

  auto lattice_arg = [&](CLI::App* sub) { sub->add_option("lattice", o.lattice, kLatticeHelp)->required(); };
  auto spin_arg = [&](CLI::App* sub) { sub->add_option("spin", o.spin, kSpinHelp)->required(); };
  std::map<std::string, std::string> betas;  // per-subcommand default grids
  auto beta_opt = [&](CLI::App* sub, const std::string& fallback) {
    auto& slot = betas[sub->get_name()];
    slot = fallback;
    sub->add_option("--beta", slot, kBetaHelp)->capture_default_str();
  };

  struct Entry {
    CLI::App* app;
    void (*run)(const Options&, Run&);
  };
  std::vector<Entry> commands;
  auto add = [&](const std::string& name, const std::string& help, void (*fn)(const Options&, Run&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    commands.push_back({sub, fn});
    return sub;
  };

  auto* spectrum = add("spectrum", "all eigenvalues of H (spectrum.csv, spectrum.txt)", cmd_spectrum);
  lattice_arg(spectrum);
  spin_arg(spectrum);
  spectrum->add_option("--sector", o.sector, "restrict to 2*S3_T = <k>, or 'all'")->capture_default_str();

  auto* fe = add("free-energy", "finite-volume f(beta) and e(beta) (columns beta,f,e,beta_power_check)",
                 cmd_free_energy);
  lattice_arg(fe);
  spin_arg(fe);
  beta_opt(fe, "geom:0.1:100:31");

  auto* tp = add("two-point", "thermal <S_x.S_y> over a beta grid (beta = 0 and inf allowed)", cmd_two_point);
  lattice_arg(tp);
  spin_arg(tp);
  beta_opt(tp, "geom:0.1:100:31");
  tp->add_option("--x", o.x, "first site index")->capture_default_str();
  tp->add_option("--y", o.y, "second site index")->capture_default_str();

  auto* swd = add("sw-dispersion", "one-magnon energies: plane waves (periodic) or product cosines (free)",
                  cmd_sw_dispersion);
  lattice_arg(swd);
  spin_arg(swd);

  auto* swf = add("sw-free-energy", "non-interacting free energy f0: infinite-volume integral, optional finite grid",
                  cmd_sw_free_energy);
  spin_arg(swf);
  beta_opt(swf, "geom:1:1000:7");
  swf->add_option("--lattice", o.lattice_option, "also sum over the momentum grid of this lattice");

  add("c0", "asymptotic constant C0 by quadrature and by the zeta series", cmd_c0);

  auto* sc = add("scaling", "S^{3/2} beta^{5/2} f0 against C0 (columns beta,S,f0,rescaled,deviation)", cmd_scaling);
  spin_arg(sc);
  beta_opt(sc, "geom:1:10000:9");

  auto* hp = add("hp-verify", "spin H against H0 + K, sector by sector", cmd_hp_verify);
  lattice_arg(hp);
  spin_arg(hp);

  auto* ineq = add("inequalities", "projection and interaction operator inequalities", cmd_inequalities);
  lattice_arg(ineq);
  spin_arg(ineq);
  ineq->add_option("--n-max", o.n_max, "occupancy cap of the unconstrained basis")->capture_default_str();
  ineq->add_option("--max-particles", o.max_particles, "largest particle-number block")->capture_default_str();

  auto* dens = add("density-survey", "two-particle density of H_B eigenstates (columns E,rho_inf,rho_1,ratio)",
                   cmd_density);
  lattice_arg(dens);
  spin_arg(dens);
  dens->add_option("--total-n", o.total_n, "particle number of the block")->capture_default_str();
  dens->add_option("--e-min", o.e_lo, "lower end of the energy window (exclusive)")->capture_default_str();
  dens->add_option("--e-max", o.e_hi, "upper end of the energy window");

  auto* p1 = add("prop1", "lowest energy per total spin and the empirical spectral constant", cmd_prop1);
  lattice_arg(p1);
  spin_arg(p1);

  auto* gap = add("gap", "one-magnon gap of free boxes against pi^2 S / L^2", cmd_gap);
  spin_arg(gap);
  gap->add_option("--sides", o.sides, "box sides")->delimiter(',')->capture_default_str();
  gap->add_option("--dim", o.dim, "dimension")->capture_default_str();

  auto* tb = add("trial-bound", "Gibbs variational value of the projected free-boson state", cmd_trial_bound);
  lattice_arg(tb);
  spin_arg(tb);
  beta_opt(tb, "0.5,1,2,5");
  tb->add_option("--n-max", o.trial_n_max, "boson truncation (default 2S*N, exact)");

  auto* cmp = add("compare", "f0 against the asymptotic and literature reference curves", cmd_compare);
  spin_arg(cmp);
  beta_opt(cmp, "geom:10:10000:7");
  cmp->add_option("--c", o.preliminary_c, "constant for the preliminary reference curve");

  auto* cor = add("corollary", "two-point deficits for all site pairs against the energy per site", cmd_corollary);
  lattice_arg(cor);
  spin_arg(cor);
  beta_opt(cor, "0,0.1,0.3,1,3,10,30,100,inf");

  CLI::App* rep = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  rep->add_option("manifest", o.manifest, "path to a *.manifest.json")->required();

  std::vector<const char*> argv{"hfm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (o.threads > 0) set_thread_count(o.threads);
  if (rep->parsed()) {
    std::vector<std::string> extra;
    if (app.count("--output")) extra = {"--output", o.output};
    return replay(o, extra, depth);
  }
  for (const auto& c : commands) {
    if (!c.app->parsed()) continue;
    if (auto it = betas.find(c.app->get_name()); it != betas.end()) o.beta = it->second;
    Run run(c.app->get_name(), o.output, args);
    c.run(o, run);
    run.finish();
    return 0;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return execute(args, 0);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << " (best estimate " << format_number(e.best_estimate())
              << ", residual " << format_number(e.residual()) << ")\n";
    return kExitNumerical;
  } catch (const QuadratureError& e) {
    std::cerr << "numerical failure: " << e.what() << " (value " << format_number(e.value()) << ", error bound "
              << format_number(e.error_bound()) << ")\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}
