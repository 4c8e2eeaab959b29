#include "potts/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "potts/error.hpp"

namespace potts {

void SparseKernel::Builder::add_row(std::vector<std::pair<std::size_t, double>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < entries.size();) {
    const std::size_t c = entries[i].first;
    if (c >= states_) throw DimensionError("kernel column out of range");
    double v = 0.0;
    for (; i < entries.size() && entries[i].first == c; ++i) v += entries[i].second;
    col_.push_back(c);
    val_.push_back(v);
  }
  row_ptr_.push_back(col_.size());
}

SparseKernel SparseKernel::Builder::build() && {
  if (row_ptr_.size() != states_ + 1) throw DimensionError("kernel builder: wrong number of rows");
  SparseKernel k;
  k.states_ = states_;
  k.row_ptr_ = std::move(row_ptr_);
  k.col_ = std::move(col_);
  k.val_ = std::move(val_);
  return k;
}

double SparseKernel::entry(std::size_t row, std::size_t col) const {
  auto cols = row_columns(row);
  auto it = std::lower_bound(cols.begin(), cols.end(), col);
  if (it == cols.end() || *it != col) return 0.0;
  return row_values(row)[static_cast<std::size_t>(it - cols.begin())];
}

double SparseKernel::row_sum(std::size_t row) const {
  double s = 0.0;
  for (double v : row_values(row)) s += v;
  return s;
}

std::vector<double> SparseKernel::left_apply(std::span<const double> dist) const {
  if (dist.size() != states_) throw DimensionError("distribution length does not match kernel");
  std::vector<double> out(states_, 0.0);
  for (std::size_t i = 0; i < states_; ++i) {
    const double p = dist[i];
    if (p == 0.0) continue;
    auto cols = row_columns(i);
    auto vals = row_values(i);
    for (std::size_t e = 0; e < cols.size(); ++e) out[cols[e]] += p * vals[e];
  }
  return out;
}

double stationarity_residual(const SparseKernel& k, std::span<const double> pi) {
  auto next = k.left_apply(pi);
  double worst = 0.0;
  for (std::size_t i = 0; i < next.size(); ++i) worst = std::max(worst, std::abs(next[i] - pi[i]));
  return worst;
}

double max_entry_difference(const SparseKernel& a, const SparseKernel& b) {
  if (a.states() != b.states()) throw DimensionError("kernels of different size");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.states(); ++i) {
    for (std::size_t c : a.row_columns(i)) worst = std::max(worst, std::abs(a.entry(i, c) - b.entry(i, c)));
    for (std::size_t c : b.row_columns(i)) worst = std::max(worst, std::abs(a.entry(i, c) - b.entry(i, c)));
  }
  return worst;
}

double detailed_balance_residual(const SparseKernel& k, std::span<const double> pi) {
  double worst = 0.0;
  for (std::size_t i = 0; i < k.states(); ++i) {
    auto cols = k.row_columns(i);
    auto vals = k.row_values(i);
    for (std::size_t e = 0; e < cols.size(); ++e) {
      const std::size_t j = cols[e];
      if (j == i) continue;
      worst = std::max(worst, std::abs(pi[i] * vals[e] - pi[j] * k.entry(j, i)));
    }
  }
  return worst;
}

}  // namespace potts
