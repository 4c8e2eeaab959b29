#include "potts/ldp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "potts/equilibrium.hpp"
#include "potts/error.hpp"
#include "potts/numeric.hpp"
#include "potts/rng.hpp"

namespace potts {

namespace {

void require_same_q(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": vectors of different length");
}

double scaled_log_mean_exp(double beta, std::span<const double> x) {
  std::vector<double> bx(x.begin(), x.end());
  for (double& v : bx) v *= beta;
  return log_sum_exp(bx) - std::log(static_cast<double>(x.size()));
}

double sq_distance(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += (x[k] - y[k]) * (x[k] - y[k]);
  return acc;
}

double inner(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += x[k] * y[k];
  return acc;
}

}  // namespace

double relative_entropy(const ProbVector& nu, const ProbVector& ref) {
  require_same_q(nu.weights().size(), ref.weights().size(), "relative_entropy");
  double acc = 0.0;
  for (int k = 0; k < nu.q(); ++k) {
    if (nu[k] == 0.0) continue;
    if (ref[k] == 0.0) return std::numeric_limits<double>::infinity();
    acc += nu[k] * std::log(nu[k] / ref[k]);
  }
  return acc;
}

double alpha(double beta, const ProbVector& gamma, const ProbVector& nu) {
  const ProbVector rho = ProbVector::uniform(gamma.q());
  return beta * dot(gamma, nu) - relative_entropy(gamma, rho) - relative_entropy(nu, rho);
}

double alpha_split(double beta, const ProbVector& gamma, const ProbVector& nu) {
  require_same_q(gamma.weights().size(), nu.weights().size(), "alpha_split");
  return alpha_diag(beta, gamma) + alpha_diag(beta, nu) -
         0.5 * beta * sq_distance(gamma.weights(), nu.weights());
}

double alpha_diag(double beta, const ProbVector& gamma) {
  return 0.5 * beta * dot(gamma, gamma) - relative_entropy(gamma, ProbVector::uniform(gamma.q()));
}

double rate_function(double beta, const ProbVector& gamma, const ProbVector& nu, double sup_alpha,
                     double tol) {
  const double a = alpha(beta, gamma, nu);
  const double rate = sup_alpha - a;
  if (rate < -tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "rate_function: alpha " << a << " exceeds the supplied supremum " << sup_alpha;
    throw InconsistencyError(msg.str());
  }
  return rate < 0.0 ? 0.0 : rate;
}

double lmgf(std::span<const double> x, std::span<const double> y) {
  require_same_q(x.size(), y.size(), "lmgf");
  return scaled_log_mean_exp(1.0, x) + scaled_log_mean_exp(1.0, y);
}

double free_energy_functional(double beta, std::span<const double> x, std::span<const double> y) {
  require_same_q(x.size(), y.size(), "free_energy_functional");
  return beta * inner(x, y) - scaled_log_mean_exp(beta, x) - scaled_log_mean_exp(beta, y);
}

double free_energy_functional_split(double beta, std::span<const double> x, std::span<const double> y) {
  require_same_q(x.size(), y.size(), "free_energy_functional_split");
  return free_energy_functional_diag(beta, x) + free_energy_functional_diag(beta, y) -
         0.5 * beta * sq_distance(x, y);
}

double free_energy_functional_diag(double beta, std::span<const double> x) {
  return 0.5 * beta * inner(x, x) - scaled_log_mean_exp(beta, x);
}

std::vector<double> free_energy_functional_diag_gradient(double beta, std::span<const double> x) {
  std::vector<double> g(x.size());
  softmax(x, beta, g);
  for (std::size_t k = 0; k < x.size(); ++k) g[k] = beta * (x[k] - g[k]);
  return g;
}

DiagonalMinimum minimize_free_energy_diag(double beta, int q, double grad_tol, long max_iterations) {
  if (q < 2 || q > kMaxSpinStates) throw ParameterError("minimize_free_energy_diag: bad q");
  if (!(beta >= 0.0)) throw ParameterError("minimize_free_energy_diag: beta must be >= 0");
  if (!(grad_tol > 0.0)) throw ParameterError("minimize_free_energy_diag: grad_tol must be positive");

  const auto uq = static_cast<std::size_t>(q);
  DiagonalMinimum best;
  best.value = std::numeric_limits<double>::infinity();
  if (beta == 0.0) {
    best.value = 0.0;
    best.argmin.assign(uq, 1.0 / q);
    best.starts = 1;
    return best;
  }

  std::vector<std::vector<double>> starts;
  starts.emplace_back(uq, 1.0 / q);
  for (int k = 0; k < q; ++k) {
    std::vector<double> e(uq, 0.0);
    e[static_cast<std::size_t>(k)] = 1.0;
    starts.push_back(std::move(e));
  }
  const SRoot root = detail::largest_root(beta, q, 1e-12);
  if (root.nontrivial) {
    const ProbVector nu = phi(root.s, q);
    starts.emplace_back(nu.weights().begin(), nu.weights().end());
  }
  RngStream rng({0x5eedULL, 0}, lanes::sampling);
  for (int i = 0; i < 8; ++i) {
    std::vector<double> x(uq);
    double total = 0.0;
    for (double& v : x) total += (v = -std::log(1.0 - rng.uniform()));
    for (double& v : x) v /= total;
    starts.push_back(std::move(x));
  }

  // Descent with step 1/beta: x - grad/beta = g(x), so each step is the
  // mean-field map.
  std::vector<std::string> trace;
  double best_unconverged = std::numeric_limits<double>::infinity();
  std::vector<double> next(uq);
  for (const auto& s : starts) {
    std::vector<double> x = s;
    long it = 0;
    double grad = std::numeric_limits<double>::infinity();
    for (; it < max_iterations; ++it) {
      softmax(x, beta, next);
      grad = 0.0;
      for (std::size_t k = 0; k < uq; ++k) grad = std::max(grad, beta * std::abs(x[k] - next[k]));
      if (grad <= grad_tol) break;
      x.swap(next);
    }
    best.iterations += it;
    ++best.starts;
    const double value = 2.0 * free_energy_functional_diag(beta, x);
    if (grad <= grad_tol) {
      if (value < best.value) {
        best.value = value;
        best.argmin = x;
      }
    } else {
      best_unconverged = std::min(best_unconverged, value);
      std::ostringstream line;
      line.precision(17);
      line << "start " << best.starts << ": |grad|=" << grad << " value=" << value << " after " << it
           << " iterations";
      trace.push_back(line.str());
    }
  }
  if (!std::isfinite(best.value)) {
    throw ConvergenceError("minimize_free_energy_diag: no start reached the gradient tolerance", trace);
  }
  if (best_unconverged < best.value - 1e-12) {
    throw ConvergenceError("minimize_free_energy_diag: an unconverged start undercuts the best minimum", trace);
  }
  return best;
}

double sup_alpha(double beta, int q) {
  if (q < 2) throw ParameterError("sup_alpha: q must be >= 2");
  if (!(beta >= 0.0)) throw ParameterError("sup_alpha: beta must be >= 0");
  const double at_rho = alpha_diag(beta, ProbVector::uniform(q));
  const SRoot root = detail::largest_root(beta, q, 1e-12);
  const double at_nu = root.nontrivial ? alpha_diag(beta, phi(root.s, q)) : at_rho;
  return 2.0 * std::max(at_rho, at_nu);
}

double free_energy(double beta, int q) {
  if (!(beta > 0.0)) throw ParameterError("free_energy: beta must be > 0");
  return -sup_alpha(beta, q) / beta;
}

DualityReport duality_gap(double beta, int q, double grad_tol) {
  DualityReport r;
  r.sup_alpha = sup_alpha(beta, q);
  r.inf_g = minimize_free_energy_diag(beta, q, grad_tol).value;
  r.gap = std::abs(r.sup_alpha + r.inf_g);
  return r;
}

}  // namespace potts
