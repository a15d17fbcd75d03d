#pragma once

#include <span>
#include <vector>

namespace hfm {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Supported orders: 7, 10, 15, 20, 25, 30. Throws ConfigError otherwise.
const GaussRule& gauss_legendre(int order);

/// Next supported order above `order` (used as the error-estimating partner).
int next_gauss_order(int order);

/// Pairwise (cascade) summation; result is independent of thread count.
double pairwise_sum(std::span<const double> values);

/// ln(1 − e^{−x}) for x > 0 without cancellation.
double log_one_minus_exp(double x);

struct BoundedValue {
  double value = 0.0;
  double error_bound = 0.0;
};

/// ζ(5/2) = Σ n^{-5/2}: partial sum plus the midpoint of the two integral tail
/// bounds. The reported bound is half the bracket width plus rounding slack.
BoundedValue zeta_five_halves(double tolerance);

}  // namespace hfm
