#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hfm {

/// One site's digit. Digits stay below kMaxDigit so products of two fit in int.
using Digit = std::uint16_t;
inline constexpr int kMaxDigit = 4095;

/// Digit change applied to one site: (site, delta).
using DigitChange = std::pair<std::size_t, int>;

/// Ordered set of digit strings d ∈ {0..max_digit}^N, optionally restricted to
/// a fixed digit sum. This is the common storage behind spin sectors (digit =
/// m + S) and boson blocks (digit = occupancy).
///
/// Configurations are listed in lexicographic order, site 0 most significant.
/// Lookup uses a weighted key Σ d_x w_x (mod 2^64); when (max_digit+1)^N fits in
/// 64 bits the weights are the mixed-radix place values and the key is the exact
/// configuration code, otherwise pseudo-random weights are used and hits are
/// verified digit by digit.
class ConfigurationSet {
 public:
  static constexpr std::size_t kDefaultCap = 20'000'000;

  ConfigurationSet(std::size_t num_sites, int max_digit, std::optional<long> digit_sum,
                   std::size_t cap = kDefaultCap);

  std::size_t size() const noexcept { return keys_.size(); }
  std::size_t num_sites() const noexcept { return num_sites_; }
  int max_digit() const noexcept { return max_digit_; }
  std::optional<long> digit_sum() const noexcept { return digit_sum_; }
  bool exact_keys() const noexcept { return exact_; }

  std::span<const Digit> digits(std::size_t i) const {
    return {digits_.data() + i * num_sites_, num_sites_};
  }
  std::uint64_t key(std::size_t i) const { return keys_[i]; }

  std::optional<std::size_t> find(std::span<const Digit> config) const;

  /// Index of digits(base) with the given changes applied, if present. The
  /// caller guarantees the modified digits stay within [0, max_digit].
  std::optional<std::size_t> find_modified(std::size_t base, std::span<const DigitChange> changes) const;

 private:
  std::uint64_t key_of(std::span<const Digit> config) const;

  std::size_t num_sites_;
  int max_digit_;
  std::optional<long> digit_sum_;
  bool exact_ = false;
  std::vector<std::uint64_t> weights_;
  std::vector<Digit> digits_;
  std::vector<std::uint64_t> keys_;
  std::unordered_multimap<std::uint64_t, std::size_t> lookup_;
};

/// Number of digit strings of length n over {0..max_digit} with the given sum
/// (all strings when sum is empty), saturating at UINT64_MAX.
std::uint64_t count_configurations(std::size_t n, int max_digit, std::optional<long> digit_sum);

}  // namespace hfm
