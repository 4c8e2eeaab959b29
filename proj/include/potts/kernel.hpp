#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace potts {

/// Row-compressed transition matrix.  Columns within a row are sorted and unique.
class SparseKernel {
 public:
  class Builder {
   public:
    explicit Builder(std::size_t states) : states_(states) { row_ptr_.push_back(0); }

    /// Entries of the next row; duplicate columns are summed.
    void add_row(std::vector<std::pair<std::size_t, double>> entries);
    SparseKernel build() &&;

   private:
    std::size_t states_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_;
    std::vector<double> val_;
  };

  std::size_t states() const noexcept { return states_; }
  std::size_t nonzeros() const noexcept { return val_.size(); }

  std::span<const std::size_t> row_columns(std::size_t row) const {
    return {col_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
  }
  std::span<const double> row_values(std::size_t row) const {
    return {val_.data() + row_ptr_[row], row_ptr_[row + 1] - row_ptr_[row]};
  }

  double entry(std::size_t row, std::size_t col) const;
  double row_sum(std::size_t row) const;

  /// dist * K.
  std::vector<double> left_apply(std::span<const double> dist) const;

 private:
  std::size_t states_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_;
  std::vector<double> val_;
};

/// max_i |(pi K)_i - pi_i|.
double stationarity_residual(const SparseKernel& k, std::span<const double> pi);

/// max over entries of |A - B|, treating missing entries as zero.
double max_entry_difference(const SparseKernel& a, const SparseKernel& b);

/// max over one-site-apart pairs of |pi(x)K(x,y) - pi(y)K(y,x)|.
double detailed_balance_residual(const SparseKernel& k, std::span<const double> pi);

}  // namespace potts
