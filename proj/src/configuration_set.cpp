#include "hfm/configuration_set.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "hfm/errors.hpp"

namespace hfm {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t count_configurations(std::size_t n, int max_digit, std::optional<long> digit_sum) {
  const std::uint64_t radix = static_cast<std::uint64_t>(max_digit) + 1;
  if (!digit_sum) {
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (total > kSaturated / radix) return kSaturated;
      total *= radix;
    }
    return total;
  }
  const long target = *digit_sum;
  if (target < 0 || target > static_cast<long>(n) * max_digit) return 0;
  // ways[s] = strings of current length with sum s
  std::vector<std::uint64_t> ways(static_cast<std::size_t>(target) + 1, 0);
  ways[0] = 1;
  for (std::size_t site = 0; site < n; ++site) {
    std::vector<std::uint64_t> next(ways.size(), 0);
    for (std::size_t s = 0; s < ways.size(); ++s) {
      if (ways[s] == 0) continue;
      for (int d = 0; d <= max_digit && s + d < ways.size(); ++d) next[s + d] = sat_add(next[s + d], ways[s]);
    }
    ways.swap(next);
  }
  return ways[static_cast<std::size_t>(target)];
}

ConfigurationSet::ConfigurationSet(std::size_t num_sites, int max_digit, std::optional<long> digit_sum,
                                   std::size_t cap)
    : num_sites_(num_sites), max_digit_(max_digit), digit_sum_(digit_sum) {
  if (max_digit < 1 || max_digit > kMaxDigit)
    throw ConfigError("per-site digit range must be 1.." + std::to_string(kMaxDigit));
  const std::uint64_t expected = count_configurations(num_sites, max_digit, digit_sum);
  if (expected > cap)
    throw InfeasibleError("configuration space of dimension " +
                          (expected == kSaturated ? std::string(">2^64") : std::to_string(expected)) +
                          " exceeds the cap of " + std::to_string(cap));

  const std::uint64_t radix = static_cast<std::uint64_t>(max_digit) + 1;
  weights_.assign(num_sites, 0);
  exact_ = count_configurations(num_sites, max_digit, std::nullopt) != kSaturated;
  if (exact_) {
    std::uint64_t place = 1;
    for (std::size_t i = num_sites; i-- > 0;) {
      weights_[i] = place;
      place *= radix;
    }
  } else {
    for (std::size_t i = 0; i < num_sites; ++i) weights_[i] = splitmix64(i) | 1ULL;
  }

  keys_.reserve(expected);
  digits_.reserve(expected * num_sites);

  // Depth-first enumeration in lexicographic order with remaining-sum pruning.
  std::vector<Digit> current(num_sites, 0);
  const long target = digit_sum.value_or(-1);
  auto feasible = [&](std::size_t next_site, long used) {
    if (target < 0) return true;
    const long left = static_cast<long>(num_sites - next_site);
    return used <= target && target - used <= left * max_digit;
  };
  auto emit = [&] {
    digits_.insert(digits_.end(), current.begin(), current.end());
    keys_.push_back(key_of(current));
  };

  if (num_sites == 0) {
    if (target <= 0) emit();
  } else if (feasible(0, 0)) {
    std::vector<long> prefix(num_sites + 1, 0);
    std::size_t site = 0;
    std::vector<int> digit(num_sites, -1);
    while (true) {
      // advance digit at `site` to the next feasible value
      int d = digit[site] + 1;
      while (d <= max_digit && !feasible(site + 1, prefix[site] + d)) {
        if (target >= 0 && prefix[site] + d > target) {
          d = max_digit + 1;
          break;
        }
        ++d;
      }
      if (d > max_digit) {
        digit[site] = -1;
        if (site == 0) break;
        --site;
        continue;
      }
      digit[site] = d;
      current[site] = static_cast<Digit>(d);
      prefix[site + 1] = prefix[site] + d;
      if (site + 1 == num_sites) {
        emit();
      } else {
        ++site;
      }
    }
  }

  lookup_.reserve(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) lookup_.emplace(keys_[i], i);
}

std::uint64_t ConfigurationSet::key_of(std::span<const Digit> config) const {
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < num_sites_; ++i) k += weights_[i] * config[i];
  return k;
}

std::optional<std::size_t> ConfigurationSet::find(std::span<const Digit> config) const {
  if (config.size() != num_sites_) return std::nullopt;
  const auto [lo, hi] = lookup_.equal_range(key_of(config));
  for (auto it = lo; it != hi; ++it) {
    if (exact_ || std::equal(config.begin(), config.end(), digits(it->second).begin())) return it->second;
  }
  return std::nullopt;
}

std::optional<std::size_t> ConfigurationSet::find_modified(std::size_t base,
                                                           std::span<const DigitChange> changes) const {
  std::uint64_t k = keys_[base];
  for (const auto& [site, delta] : changes) k += weights_[site] * static_cast<std::uint64_t>(static_cast<std::int64_t>(delta));
  const auto [lo, hi] = lookup_.equal_range(k);
  if (lo == hi) return std::nullopt;
  if (exact_) return lo->second;
  const auto ref = digits(base);
  for (auto it = lo; it != hi; ++it) {
    const auto cand = digits(it->second);
    bool same = true;
    for (std::size_t j = 0; j < num_sites_ && same; ++j) {
      int expect = ref[j];
      for (const auto& [site, delta] : changes)
        if (site == j) expect += delta;
      same = cand[j] == expect;
    }
    if (same) return it->second;
  }
  return std::nullopt;
}

}  // namespace hfm
