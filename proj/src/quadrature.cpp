#include "hfm/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "hfm/errors.hpp"

namespace hfm {

namespace {

template <unsigned N>
GaussRule make_rule() {
  using Gauss = boost::math::quadrature::gauss<double, N>;
  const auto& abscissa = Gauss::abscissa();
  const auto& weights = Gauss::weights();
  GaussRule rule;
  // boost stores the non-negative half; node 0 is the centre for odd N.
  for (std::size_t i = abscissa.size(); i-- > 0;) {
    if (abscissa[i] == 0.0) continue;
    rule.nodes.push_back(-abscissa[i]);
    rule.weights.push_back(weights[i]);
  }
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    rule.nodes.push_back(abscissa[i]);
    rule.weights.push_back(weights[i]);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static const GaussRule r7 = make_rule<7>();
  static const GaussRule r10 = make_rule<10>();
  static const GaussRule r15 = make_rule<15>();
  static const GaussRule r20 = make_rule<20>();
  static const GaussRule r25 = make_rule<25>();
  static const GaussRule r30 = make_rule<30>();
  switch (order) {
    case 7: return r7;
    case 10: return r10;
    case 15: return r15;
    case 20: return r20;
    case 25: return r25;
    case 30: return r30;
    default: throw ConfigError("unsupported Gauss-Legendre order " + std::to_string(order) + " (use 7, 10, 15, 20, 25)");
  }
}

int next_gauss_order(int order) {
  switch (order) {
    case 7: return 10;
    case 10: return 15;
    case 15: return 20;
    case 20: return 25;
    case 25: return 30;
    default: throw ConfigError("no refinement partner for Gauss-Legendre order " + std::to_string(order));
  }
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 16) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double log_one_minus_exp(double x) {
  // Maechler's switch point keeps both branches accurate.
  return x > std::log(2.0) ? std::log1p(-std::exp(-x)) : std::log(-std::expm1(-x));
}

BoundedValue zeta_five_halves(double tolerance) {
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
  // Bracket width (2/3)(N^{-3/2} - (N+1)^{-3/2}) ~ N^{-5/2}.
  const double n_needed = std::pow(0.1 * tolerance, -0.4);
  const auto n = static_cast<long>(std::max(1000.0, std::ceil(n_needed)));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double partial = 0.0;
  double rounding = 0.0;  // running bound: one rounding per pow and per add
  for (long k = n; k >= 1; --k) {
    const double term = std::pow(static_cast<double>(k), -2.5);
    partial += term;
    rounding += eps * (term + partial);
  }
  const double upper = (2.0 / 3.0) * std::pow(static_cast<double>(n), -1.5);
  const double lower = (2.0 / 3.0) * std::pow(static_cast<double>(n + 1), -1.5);
  BoundedValue out;
  out.value = partial + 0.5 * (upper + lower);
  out.error_bound = 0.5 * (upper - lower) + rounding;
  return out;
}

}  // namespace hfm
