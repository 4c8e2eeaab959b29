#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace potts {

/// log(sum_i exp(x_i)), shifted by the maximum.
inline double log_sum_exp(std::span<const double> x) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : x) m = v > m ? v : m;
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : x) acc += std::exp(v - m);
  return m + std::log(acc);
}

/// out_k = exp(scale*z_k) / sum_j exp(scale*z_j).
inline void softmax(std::span<const double> z, double scale, std::span<double> out) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : z) m = scale * v > m ? scale * v : m;
  double acc = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    out[k] = std::exp(scale * z[k] - m);
    acc += out[k];
  }
  for (double& v : out) v /= acc;
}

/// Sum pairs (a0+a1), (a2+a3), ... level by level.  The result depends only
/// on the input order, not on who produced the terms.
inline double pairwise_sum(std::vector<double> terms) {
  if (terms.empty()) return 0.0;
  while (terms.size() > 1) {
    std::size_t out = 0;
    for (std::size_t i = 0; i < terms.size(); i += 2) {
      terms[out++] = i + 1 < terms.size() ? terms[i] + terms[i + 1] : terms[i];
    }
    terms.resize(out);
  }
  return terms[0];
}

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
  bool converged = true;
};

/// Adaptive Simpson on [a, b] starting from `panels` equal panels; each panel
/// is halved until the Richardson error estimate meets its share of
/// max(rel_tol * |I|, abs_floor).
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  int panels, double rel_tol, int max_depth = 50,
                                  double abs_floor = 1e-15);

}  // namespace potts
