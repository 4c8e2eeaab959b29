#include "potts/glauber.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "potts/error.hpp"
#include "potts/numeric.hpp"

namespace potts {

namespace {

#ifdef POTTS_FAULT_NEGATE_BETA
constexpr double kBetaSign = -1.0;  // deliberately broken build for the mutation test
#else
constexpr double kBetaSign = 1.0;
#endif

}  // namespace

void g_map(std::span<const double> z, double beta, std::span<double> out) {
  softmax(z, kBetaSign * beta, out);
}

ProbVector g_map(const ProbVector& z, double beta) {
  std::vector<double> out(static_cast<std::size_t>(z.q()));
  g_map(z.weights(), beta, out);
  return ProbVector(std::move(out));
}

std::vector<double> g_jacobian(const ProbVector& z, double beta) {
  const auto q = static_cast<std::size_t>(z.q());
  std::vector<double> g(q);
  g_map(z.weights(), beta, g);
  std::vector<double> jac(q * q);
  for (std::size_t k = 0; k < q; ++k) {
    for (std::size_t j = 0; j < q; ++j) {
      jac[k * q + j] = beta * g[k] * ((k == j ? 1.0 : 0.0) - g[j]);
    }
  }
  return jac;
}

void check_invariants(const ChainState& state) {
  if (!(state.mags == magnetization(state.config))) {
    throw InconsistencyError("cached magnetization differs from the configuration at step " +
                             std::to_string(state.step));
  }
}

ProbVector update_distribution(const ModelParams& params, const ChainState& state, Side side,
                               std::size_t vertex) {
  if (vertex >= static_cast<std::size_t>(params.n())) {
    throw ParameterError("vertex " + std::to_string(vertex) + " out of range for n=" + std::to_string(params.n()));
  }
  if (state.config.q() != params.q() || state.config.n() != params.n()) {
    throw DimensionError("chain state does not match the model's (q, n)");
  }
  return g_map(state.mags.side(opposite(side)).proportions(), params.beta());
}

SparseKernel glauber_kernel_from_update_laws(const ModelParams& params, EnumerationCap cap) {
  require_enumerable(params, cap);
  const std::uint64_t states = config_state_count(params);
  const int q = params.q();
  const int n = params.n();
  std::vector<std::uint64_t> place(static_cast<std::size_t>(2 * n));
  std::uint64_t v = 1;
  for (auto& p : place) {
    p = v;
    v *= static_cast<std::uint64_t>(q);
  }
  const double pick = 1.0 / (2.0 * n);
  SparseKernel::Builder builder(static_cast<std::size_t>(states));
  for (std::uint64_t x = 0; x < states; ++x) {
    const ChainState st(decode_config(params, x));
    const ProbVector from_right = update_distribution(params, st, Side::left, 0);
    const ProbVector from_left = update_distribution(params, st, Side::right, 0);
    std::vector<std::pair<std::size_t, double>> row;
    row.reserve(static_cast<std::size_t>(2 * n * q));
    for (int site = 0; site < 2 * n; ++site) {
      const Side side = site < n ? Side::left : Side::right;
      const ProbVector& law = side == Side::left ? from_right : from_left;
      const auto i = static_cast<std::size_t>(side == Side::left ? site : site - n);
      const auto cur = static_cast<std::uint64_t>(st.config.side(side)[i]);
      for (int k = 0; k < q; ++k) {
        const std::uint64_t y = x - cur * place[static_cast<std::size_t>(site)] +
                                static_cast<std::uint64_t>(k) * place[static_cast<std::size_t>(site)];
        row.emplace_back(static_cast<std::size_t>(y), pick * law[k]);
      }
    }
    builder.add_row(std::move(row));
  }
  return std::move(builder).build();
}

std::vector<double> update_weight_table(const ModelParams& params) {
  const int n = params.n();
  std::vector<double> table(static_cast<std::size_t>(n + 1));
  for (int c = 0; c <= n; ++c) {
    table[static_cast<std::size_t>(c)] = std::exp(kBetaSign * params.beta() * (c - n) / n);
  }
  return table;
}

int sample_spin(std::span<const double> weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  double target = u * total;
  const int q = static_cast<int>(weights.size());
  for (int k = 0; k + 1 < q; ++k) {
    target -= weights[static_cast<std::size_t>(k)];
    if (target < 0.0) return k;
  }
  return q - 1;
}

GlauberChain::GlauberChain(ModelParams params, RngSpec rng, BipartiteConfig initial)
    : params_(params), rng_(rng), state_(std::move(initial)), table_(update_weight_table(params)) {
  if (state_.config.q() != params.q() || state_.config.n() != params.n()) {
    throw DimensionError("initial configuration does not match the model's (q, n)");
  }
}

void GlauberChain::step() {
  const int q = params_.q();
  const int n = params_.n();
  const auto r = rng_.bits(state_.step, lanes::dynamics);
  const auto site = static_cast<int>(CounterRng::to_index(r[0], static_cast<std::uint64_t>(2 * n)));
  const Side side = site < n ? Side::left : Side::right;
  const auto i = static_cast<std::size_t>(side == Side::left ? site : site - n);

  double w[kMaxSpinStates];
  const auto other = state_.mags.side(opposite(side)).counts();
  for (int k = 0; k < q; ++k) w[k] = table_[static_cast<std::size_t>(other[static_cast<std::size_t>(k)])];
  const int next = sample_spin({w, static_cast<std::size_t>(q)}, CounterRng::to_unit(r[1]));

  const int cur = state_.config.side(side)[i];
  if (next != cur) {
    state_.config.assign(side, i, static_cast<Spin>(next));
    state_.mags.side(side).transfer(cur, next);
  }
  ++state_.step;
#ifdef POTTS_DEBUG_INVARIANTS
  check_invariants(state_);
#endif
}

void GlauberChain::advance(std::uint64_t steps) {
  for (std::uint64_t t = 0; t < steps; ++t) step();
}

std::vector<TrajectoryRecord> GlauberChain::run(std::uint64_t steps, std::uint64_t record_every) {
  if (record_every == 0) throw ParameterError("record_every must be >= 1");
  std::vector<TrajectoryRecord> out;
  out.reserve(static_cast<std::size_t>(steps / record_every + 1));
  out.push_back({state_.step, state_.mags});
  for (std::uint64_t t = 1; t <= steps; ++t) {
    step();
    if (t % record_every == 0) out.push_back({state_.step, state_.mags});
  }
  return out;
}

BipartiteConfig initial_config(const ModelParams& params, const std::string& kind, RngSpec rng) {
  const int q = params.q();
  const int n = params.n();
  if (kind == "uniform") {
    RngStream s(rng, lanes::initial_state);
    std::vector<Spin> left(static_cast<std::size_t>(n));
    std::vector<Spin> right(static_cast<std::size_t>(n));
    for (auto& v : left) v = static_cast<Spin>(s.index(static_cast<std::uint64_t>(q)));
    for (auto& v : right) v = static_cast<Spin>(s.index(static_cast<std::uint64_t>(q)));
    return {SpinConfig(q, std::move(left)), SpinConfig(q, std::move(right))};
  }
  if (kind.rfind("ordered:", 0) == 0) {
    int k = -1;
    try {
      std::size_t used = 0;
      k = std::stoi(kind.substr(8), &used);
      if (used != kind.size() - 8) k = -1;
    } catch (const std::exception&) {
      k = -1;
    }
    if (k < 0 || k >= q) throw ParameterError("ordered:k needs 0 <= k < q, got '" + kind + "'");
    return BipartiteConfig::constant(q, n, static_cast<Spin>(k));
  }
  throw ParameterError("unknown initial state '" + kind + "' (expected uniform, ordered:k or a file)");
}

BipartiteConfig read_config_file(const std::string& path, int q) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open configuration file " + path);
  std::vector<std::vector<Spin>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::vector<Spin> row;
    int v = 0;
    while (ls >> v) {
      if (v < 0 || v >= q) throw ParameterError("spin " + std::to_string(v) + " in " + path + " is not in [0, q)");
      row.push_back(static_cast<Spin>(v));
    }
    if (!ls.eof()) throw ParameterError("non-integer token in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.size() != 2) throw ParameterError(path + ": expected two rows (left, right)");
  return {SpinConfig(q, std::move(rows[0])), SpinConfig(q, std::move(rows[1]))};
}

}  // namespace potts
