#include "hfm/sparse_operator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>

#include "hfm/errors.hpp"

namespace hfm {

SparseOperator::SparseOperator(std::size_t dim) : dim_(dim), row_ptr_(dim + 1, 0) {}

SparseOperator SparseOperator::from_rows(std::vector<std::vector<Entry>> rows, double drop_below) {
  SparseOperator op(rows.size());
  std::size_t total = 0;
  for (auto& row : rows) {
    std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
    std::size_t w = 0;
    for (std::size_t r = 0; r < row.size(); ++r) {
      if (w > 0 && row[w - 1].first == row[r].first) {
        row[w - 1].second += row[r].second;
      } else {
        row[w++] = row[r];
      }
    }
    row.resize(w);
    std::erase_if(row, [drop_below](const Entry& e) { return std::abs(e.second) <= drop_below; });
    total += row.size();
  }
  op.cols_.reserve(total);
  op.values_.reserve(total);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& [c, v] : rows[i]) {
      if (c >= op.dim_) throw ConfigError("sparse entry column out of range");
      op.cols_.push_back(c);
      op.values_.push_back(v);
    }
    op.row_ptr_[i + 1] = op.cols_.size();
  }
  return op;
}

double SparseOperator::at(std::size_t row, std::size_t col) const {
  const auto cols = row_columns(row);
  const auto it = std::lower_bound(cols.begin(), cols.end(), col);
  if (it == cols.end() || *it != col) return 0.0;
  return values_[row_ptr_[row] + static_cast<std::size_t>(it - cols.begin())];
}

void SparseOperator::apply(std::span<const double> in, std::span<double> out) const {
  for (std::size_t i = 0; i < dim_; ++i) {
    double acc = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) acc += values_[p] * in[cols_[p]];
    out[i] = acc;
  }
}

void SparseOperator::apply(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
  for (std::size_t i = 0; i < dim_; ++i) {
    std::complex<double> acc = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) acc += values_[p] * in[cols_[p]];
    out[i] = acc;
  }
}

Eigen::VectorXd SparseOperator::apply(const Eigen::VectorXd& in) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(dim_));
  apply(std::span<const double>(in.data(), dim_), std::span<double>(out.data(), dim_));
  return out;
}

Eigen::MatrixXd SparseOperator::apply(const Eigen::MatrixXd& in) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_), in.cols());
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      out.row(static_cast<Eigen::Index>(i)) += values_[p] * in.row(static_cast<Eigen::Index>(cols_[p]));
  return out;
}

Eigen::MatrixXd SparseOperator::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dim_);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols_[p])) = values_[p];
  return m;
}

SparseOperator SparseOperator::transpose() const {
  std::vector<std::vector<Entry>> rows(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) rows[cols_[p]].emplace_back(i, values_[p]);
  return from_rows(std::move(rows));
}

double SparseOperator::asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      worst = std::max(worst, std::abs(values_[p] - at(cols_[p], i)));
  return worst;
}

double SparseOperator::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

void SparseOperator::write_triplets(std::ostream& os) const {
  os << dim_ << ' ' << nnz() << '\n';
  os << std::setprecision(17);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) os << i << ' ' << cols_[p] << ' ' << values_[p] << '\n';
}

SparseOperator SparseOperator::read_triplets(std::istream& is) {
  std::size_t dim = 0;
  std::size_t nnz = 0;
  if (!(is >> dim >> nnz)) throw ConfigError("triplet stream: missing 'dim nnz' header");
  std::vector<std::vector<Entry>> rows(dim);
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t i = 0;
    std::size_t j = 0;
    double v = 0.0;
    if (!(is >> i >> j >> v)) throw ConfigError("triplet stream: truncated after " + std::to_string(k) + " entries");
    if (i >= dim || j >= dim) throw ConfigError("triplet stream: index out of range");
    rows[i].emplace_back(j, v);
  }
  return from_rows(std::move(rows));
}

namespace {

SparseOperator combine(const SparseOperator& a, const SparseOperator& b, double sign) {
  if (a.dim() != b.dim()) throw ConfigError("operator dimension mismatch");
  std::vector<std::vector<SparseOperator::Entry>> rows(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const auto ac = a.row_columns(i);
    const auto av = a.row_values(i);
    const auto bc = b.row_columns(i);
    const auto bv = b.row_values(i);
    for (std::size_t p = 0; p < ac.size(); ++p) rows[i].emplace_back(ac[p], av[p]);
    for (std::size_t p = 0; p < bc.size(); ++p) rows[i].emplace_back(bc[p], sign * bv[p]);
  }
  return SparseOperator::from_rows(std::move(rows));
}

}  // namespace

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) { return combine(a, b, 1.0); }
SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) { return combine(a, b, -1.0); }

SparseOperator operator*(double s, const SparseOperator& a) {
  SparseOperator out = a;
  for (double& v : out.values_) v *= s;
  return out;
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  if (a.dim() != b.dim()) throw ConfigError("operator dimension mismatch");
  std::vector<std::vector<SparseOperator::Entry>> rows(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const auto ac = a.row_columns(i);
    const auto av = a.row_values(i);
    for (std::size_t p = 0; p < ac.size(); ++p) {
      const auto bc = b.row_columns(ac[p]);
      const auto bv = b.row_values(ac[p]);
      for (std::size_t q = 0; q < bc.size(); ++q) rows[i].emplace_back(bc[q], av[p] * bv[q]);
    }
  }
  return SparseOperator::from_rows(std::move(rows));
}

double commutator_max_entry(const SparseOperator& a, const SparseOperator& b) {
  return (a * b - b * a).max_abs();
}

}  // namespace hfm
