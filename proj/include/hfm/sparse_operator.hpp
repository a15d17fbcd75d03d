#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hfm {

/// Real square matrix in compressed-row form. Column indices are sorted and
/// unique within each row.
class SparseOperator {
 public:
  using Entry = std::pair<std::size_t, double>;

  SparseOperator() = default;
  explicit SparseOperator(std::size_t dim);

  /// Builds from per-row (column, value) lists; duplicates are summed and
  /// entries with |value| <= drop_below are removed.
  static SparseOperator from_rows(std::vector<std::vector<Entry>> rows, double drop_below = 0.0);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_columns(std::size_t row) const {
    return {cols_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
  }
  std::span<const double> row_values(std::size_t row) const {
    return {values_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
  }

  double at(std::size_t row, std::size_t col) const;

  void apply(std::span<const double> in, std::span<double> out) const;
  void apply(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& in) const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& in) const;

  Eigen::MatrixXd to_dense() const;
  SparseOperator transpose() const;

  /// Max |A_ij - A_ji| over stored entries.
  double asymmetry() const;

  /// Writes "dim nnz" then one "i j value" line per stored entry, row-major.
  void write_triplets(std::ostream& os) const;
  static SparseOperator read_triplets(std::istream& is);

  friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(double s, const SparseOperator& a);

  /// Largest |entry|; 0 for the empty operator.
  double max_abs() const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

/// Max entry of AB - BA.
double commutator_max_entry(const SparseOperator& a, const SparseOperator& b);

}  // namespace hfm
