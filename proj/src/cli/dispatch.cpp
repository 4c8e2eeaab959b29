#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"
#include "potts/aggregate_path.hpp"
#include "potts/cli.hpp"
#include "potts/coupling.hpp"
#include "potts/equilibrium.hpp"
#include "potts/error.hpp"
#include "potts/glauber.hpp"
#include "potts/lattice.hpp"
#include "potts/ldp.hpp"
#include "potts/mixing.hpp"

#ifndef POTTS_VERSION
#define POTTS_VERSION "unknown"
#endif

namespace potts::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExact = 17;  // verification artifacts
constexpr int kTrace = 10;  // bulk traces

// Nested JSON objects name subcommands; leaves are option values.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json out = json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string& name = opt->get_lnames().front();
      if (opt->count() > 0) {
        out[name] = opt->results().size() == 1 ? json(opt->results().front()) : json(opt->results());
      } else if (default_also && !opt->get_default_str().empty()) {
        out[name] = opt->get_default_str();
      }
    }
    return out.dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json root;
    try {
      root = json::parse(input);
    } catch (const json::parse_error& e) {
      throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw CLI::ConfigError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(root, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  }

  static void flatten(const json& obj, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        flatten(value, p, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      out.push_back(std::move(item));
    }
  }
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Run {
  fs::path out_dir;
  std::uint64_t seed = 1;
  std::vector<std::string> outputs;

  fs::path write(const std::string& name, const std::string& content) {
    fs::create_directories(out_dir);
    const fs::path p = out_dir / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << content;
    f.close();
    outputs.push_back(name);
    return p;
  }
};

std::string csv_row(const std::vector<double>& values, int digits) {
  std::string row;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) row += ',';
    row += format_number(values[i], digits);
  }
  return row + "\n";
}

std::string indexed_header(const std::string& stem, int q) {
  std::string h;
  for (int k = 1; k <= q; ++k) h += (k > 1 ? "," : "") + stem + "_" + std::to_string(k);
  return h;
}

std::vector<double> coords(const ProbVector& v) { return {v.weights().begin(), v.weights().end()}; }

json number_or_null(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }

BipartiteConfig make_initial(const ModelParams& p, const std::string& spec, RngSpec rng) {
  if (spec == "uniform" || spec.rfind("ordered:", 0) == 0) return initial_config(p, spec, rng);
  const std::string path = spec.rfind("file:", 0) == 0 ? spec.substr(5) : spec;
  if (!fs::exists(path)) throw UsageError("--init: expected uniform, ordered:k or a config file, got '" + spec + "'");
  BipartiteConfig cfg = read_config_file(path, p.q());
  if (cfg.n() != p.n()) throw UsageError("config file " + path + " has n=" + std::to_string(cfg.n()));
  return cfg;
}

std::uint64_t default_t_max(int n, double factor) {
  return static_cast<std::uint64_t>(std::ceil(factor * n * std::log(static_cast<double>(std::max(n, 2)))));
}

// ---------------------------------------------------------------- phase

struct PhaseArgs {
  int q = 3;
  std::optional<double> beta;
  bool sweep = false;
  double beta_min = 0.0;
  std::optional<double> beta_max;
  int steps = 201;
  bool landscape = false;
  int grid = 60;
};

int run_phase(const PhaseArgs& a, Run& run) {
  const int q = a.q;
  const MixingThreshold mt = solve_beta_mixing(q);
  const double bc = beta_critical(q);
  json out = {{"q", q},
              {"beta_c", bc},
              {"beta_s", mt.beta_s},
              {"t_star", mt.t_star},
              {"s_at_beta_c", solve_s(bc, q).s}};
  if (a.beta) {
    const PhasePoint pp = macrostates(*a.beta, q);
    json states = json::array();
    for (const ProbVector& nu : pp.macrostates) states.push_back(coords(nu));
    out["beta"] = pp.beta;
    out["s"] = pp.s;
    out["regime"] = to_string(pp.regime);
    out["macrostates"] = states;
    out["alpha_rho"] = pp.alpha_rho;
    out["alpha_nu"] = pp.alpha_nu;
    out["sup_alpha"] = sup_alpha(*a.beta, q);
  }
  if (a.sweep) {
    const double hi = a.beta_max.value_or(2.0 * bc);
    if (a.steps < 2 || !(hi > a.beta_min)) throw UsageError("--sweep needs --steps >= 2 and beta-max > beta-min");
    std::string csv = "beta,s,alpha_rho,alpha_nu,regime\n";
    for (int i = 0; i < a.steps; ++i) {
      const double beta = a.beta_min + (hi - a.beta_min) * i / (a.steps - 1);
      const PhasePoint pp = macrostates(beta, q);
      csv += csv_row({beta, pp.s, pp.alpha_rho, pp.alpha_nu}, kExact);
      csv.back() = ',';
      csv += to_string(pp.regime) + "\n";
    }
    run.write("phase_sweep.csv", csv);
    out["sweep_file"] = "phase_sweep.csv";
  }
  if (a.landscape) {
    if (!a.beta) throw UsageError("--landscape needs --beta");
    if (composition_count(q, a.grid) > 2'000'000) throw UsageError("--landscape grid too fine for this q");
    const double sup = sup_alpha(*a.beta, q);
    const CompositionIndex lattice(q, a.grid);
    std::string csv = indexed_header("gamma", q) + ",alpha,rate\n";
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      const ProbVector g = lattice.point(i).proportions();
      const double al = alpha(*a.beta, g, g);
      std::vector<double> row = coords(g);
      row.push_back(al);
      row.push_back(rate_function(*a.beta, g, g, sup));
      csv += csv_row(row, kExact);
    }
    run.write("phase_landscape.csv", csv);
    out["landscape_file"] = "phase_landscape.csv";
  }
  const std::string text = out.dump(2) + "\n";
  run.write("phase.json", text);
  std::cout << text;
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int q = 3;
  int n = 0;
  double beta = 0.0;
  std::uint64_t steps = 10000;
  std::uint64_t record_every = 100;
  std::string init = "uniform";
};

int run_simulate(const SimulateArgs& a, Run& run) {
  if (a.record_every == 0) throw UsageError("--record-every must be >= 1");
  const ModelParams p(a.q, a.n, a.beta);
  const BipartiteConfig x0 = make_initial(p, a.init, {run.seed, 0});
  GlauberChain chain(p, {run.seed, 0}, x0);
  std::string csv = "step," + indexed_header("left", a.q) + "," + indexed_header("right", a.q) + "\n";
  for (const TrajectoryRecord& r : chain.run(a.steps, a.record_every)) {
    std::vector<double> row = coords(r.mags.left.proportions());
    for (double v : coords(r.mags.right.proportions())) row.push_back(v);
    csv += std::to_string(r.step) + "," + csv_row(row, kTrace);
  }
  run.write("trajectory.csv", csv);
  std::cout << "wrote " << (run.out_dir / "trajectory.csv").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- couple

struct CoupleArgs {
  int q = 3;
  int n = 0;
  double beta = 0.0;
  int replicas = 100;
  std::uint64_t t_max = 0;
  std::string init_x = "ordered:0";
  std::string init_y = "ordered:1";
  std::uint64_t trace_stride = 0;
};

int run_couple(const CoupleArgs& a, Run& run) {
  if (a.replicas < 1) throw UsageError("--replicas must be >= 1");
  const ModelParams p(a.q, a.n, a.beta);
  const std::uint64_t t_max = a.t_max > 0 ? a.t_max : default_t_max(a.n, 200.0);
  const BipartiteConfig x0 = make_initial(p, a.init_x, {run.seed, 0xFFFFFFF0u});
  const BipartiteConfig y0 = make_initial(p, a.init_y, {run.seed, 0xFFFFFFF1u});

  std::vector<ReplicaResult> results;
  std::vector<std::vector<DistanceSample>> traces;
  if (a.trace_stride == 0) {
    results = run_coupling_replicas(p, x0, y0, t_max, run.seed, a.replicas);
  } else {
    results.resize(static_cast<std::size_t>(a.replicas));
    traces.resize(static_cast<std::size_t>(a.replicas));
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < a.replicas; ++r) {
      GreedyCoupling c(p, {run.seed, static_cast<std::uint32_t>(r)}, x0, y0);
      CouplingRun cr = c.run(t_max, a.trace_stride);
      results[static_cast<std::size_t>(r)] = {static_cast<std::uint32_t>(r), cr.coupling_time, cr.timed_out};
      traces[static_cast<std::size_t>(r)] = std::move(cr.trace);
    }
  }

  json reps = json::array();
  double sum = 0.0, sum2 = 0.0;
  int done = 0, timeouts = 0;
  for (const ReplicaResult& r : results) {
    reps.push_back({{"replica", r.stream}, {"coupling_time", number_or_null(r.coupling_time)}, {"timed_out", r.timed_out}});
    if (r.coupling_time) {
      const auto t = static_cast<double>(*r.coupling_time);
      sum += t;
      sum2 += t * t;
      ++done;
    }
    if (r.timed_out) ++timeouts;
  }
  const double mean = done > 0 ? sum / done : 0.0;
  const double var = done > 1 ? (sum2 - done * mean * mean) / (done - 1) : 0.0;
  json out = {{"q", a.q},
              {"n", a.n},
              {"beta", a.beta},
              {"seed", run.seed},
              {"t_max", t_max},
              {"initial_distance", config_distance(x0, y0)},
              {"mean_coupling_time", done > 0 ? json(mean) : json(nullptr)},
              {"stderr", done > 1 ? json(std::sqrt(std::max(var, 0.0) / done)) : json(nullptr)},
              {"timeouts", timeouts},
              {"replicas", reps}};
  run.write("couple.json", out.dump(2) + "\n");
  if (a.trace_stride > 0) {
    std::string csv = "replica,step,distance\n";
    for (std::size_t r = 0; r < traces.size(); ++r)
      for (const DistanceSample& s : traces[r])
        csv += std::to_string(r) + "," + std::to_string(s.step) + "," + std::to_string(s.distance) + "\n";
    run.write("couple_traces.csv", csv);
  }
  std::cout << "replicas " << a.replicas << ", timeouts " << timeouts << ", mean coupling time "
            << format_number(mean, kTrace) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- paths

struct PathsArgs {
  int q = 3;
  double beta = 0.0;
  int samples = 100;
  double radius = 0.05;
  int grid = 0;
  double lipschitz_radius = 1e-3;
  int lipschitz_samples = 10000;
};

int run_paths(const PathsArgs& a, Run& run) {
  const std::vector<ContractionCase> cases = a.grid > 0
                                                 ? contraction_grid_to_rho(a.beta, a.q, a.grid)
                                                 : sample_contraction_near_rho(a.beta, a.q, a.radius, a.samples, run.seed);
  const int q = a.q;
  std::string csv = indexed_header("x_start", q) + "," + indexed_header("y_start", q) + "," +
                    indexed_header("x_end", q) + "," + indexed_header("y_end", q) + ",ratio\n";
  double worst = 0.0;
  int below = 0;
  for (const ContractionCase& c : cases) {
    std::vector<double> row;
    for (const ProbVector* v : {&c.x_start, &c.y_start, &c.x_end, &c.y_end})
      for (double w : v->weights()) row.push_back(w);
    row.push_back(c.ratio);
    csv += csv_row(row, kExact);
    worst = std::max(worst, c.ratio);
    if (c.ratio < 1.0) ++below;
  }
  run.write("paths.csv", csv);
  const double lip = lipschitz_ratio_near_rho(a.beta, q, a.lipschitz_radius, a.lipschitz_samples, run.seed);
  json out = {{"q", q},
              {"beta", a.beta},
              {"mode", a.grid > 0 ? "grid" : "samples"},
              {"cases", cases.size()},
              {"below_one", below},
              {"max_ratio", worst},
              {"lipschitz_radius", a.lipschitz_radius},
              {"lipschitz_ratio", lip},
              {"jacobian_tangent_norm_at_rho", jacobian_tangent_norm_at_rho(a.beta, q)},
              {"jacobian_l1_norm_at_rho", jacobian_l1_norm_at_rho(a.beta, q)}};
  if (a.grid > 0) out["grid"] = a.grid;
  else out["radius"] = a.radius;
  run.write("paths.json", out.dump(2) + "\n");
  std::cout << "max contraction ratio " << format_number(worst, kTrace) << ", Lipschitz ratio near rho "
            << format_number(lip, kTrace) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- mix

struct MixExactArgs {
  int q = 3;
  int n = 6;
  double beta = 1.0;
  std::uint64_t t_max = 200;
  std::uint64_t max_states = 100'000;
  int coupling_replicas = 0;
};

int run_mix_exact(const MixExactArgs& a, Run& run) {
  const ModelParams p(a.q, a.n, a.beta);
  const TvCurve curve = exact_tv_curve(p, a.t_max, {a.max_states});
  std::optional<CouplingBound> bound;
  std::vector<double> corner_tv;
  if (a.coupling_replicas > 0) {
    const ProjectedChain chain = projected_kernel(p, {a.max_states});
    const std::vector<double> pi = projected_stationary(p, chain.lattice);
    const BipartiteConfig x0 = BipartiteConfig::constant(a.q, a.n, 0);
    const MagnetizationPair m = magnetization(x0);
    corner_tv = projected_tv_from(chain, pi, chain.index(m.left.counts(), m.right.counts()), a.t_max);
    bound = coupling_upper_bound(p, x0, a.t_max, run.seed, a.coupling_replicas);
  }
  std::string csv = "t,d_t,dbar_t";
  if (bound) csv += ",d_corner_t,coupling_p_t,coupling_stderr_t";
  csv += "\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    std::vector<double> row{curve.distances[i], curve.pair_distances[i]};
    if (bound) {
      row.push_back(corner_tv[i]);
      row.push_back(bound->p[i]);
      row.push_back(bound->stderr_[i]);
    }
    csv += std::to_string(curve.times[i]) + "," + csv_row(row, kExact);
  }
  run.write("mix_exact.csv", csv);
  json out = {{"q", a.q},
              {"n", a.n},
              {"beta", a.beta},
              {"t_max", a.t_max},
              {"observable", "projected chain (magnetization pair); lower-bound surrogate for full-chain TV"},
              {"start_scope", curve.start_scope},
              {"dbar_scope", curve.dbar_scope},
              {"t_mix_quarter", number_or_null(curve.t_mix_quarter)}};
  if (bound) {
    out["coupling_start"] = "all spins 0 on both sides";
    out["coupling_replicas"] = a.coupling_replicas;
    out["coupling_bound"] = "upper bound on full-chain TV from that start, estimated from replicas";
  }
  run.write("mix_exact.json", out.dump(2) + "\n");
  std::cout << "t_mix(1/4) "
            << (curve.t_mix_quarter ? std::to_string(*curve.t_mix_quarter) : std::string("not reached")) << "\n";
  return kExitOk;
}

struct MixScalingArgs {
  int q = 3;
  double beta = 0.0;
  std::vector<int> n_list{64, 128, 256, 512};
  int replicas = 200;
  double t_max_factor = 200.0;
};

int run_mix_scaling(const MixScalingArgs& a, Run& run) {
  const ScalingFit fit = coupling_time_scaling(a.q, a.beta, a.n_list, a.replicas, run.seed, {a.t_max_factor});
  std::string csv = "n,mean_tc,stderr,replicas,timeouts,t_max\n";
  json points = json::array();
  for (const ScalingPoint& pt : fit.points) {
    csv += std::to_string(pt.n) + "," + format_number(pt.mean, kExact) + "," + format_number(pt.stderr_, kExact) +
           "," + std::to_string(pt.replicas) + "," + std::to_string(pt.timeouts) + "," + std::to_string(pt.t_max) +
           "\n";
    points.push_back({{"n", pt.n},
                      {"mean_tc", pt.mean},
                      {"stderr", pt.stderr_},
                      {"replicas", pt.replicas},
                      {"timeouts", pt.timeouts},
                      {"t_max", pt.t_max}});
  }
  run.write("mix_scaling.csv", csv);
  json out = {{"q", a.q},
              {"beta", a.beta},
              {"model", "mean_tc = slope * n log n"},
              {"slope", fit.slope_a},
              {"r2", fit.r_squared},
              {"flagged", fit.flagged},
              {"warning", fit.warning},
              {"points", points}};
  run.write("mix_scaling.json", out.dump(2) + "\n");
  if (!fit.warning.empty()) std::cerr << "warning: " << fit.warning << "\n";
  std::cout << "slope " << format_number(fit.slope_a, kTrace) << ", R^2 " << format_number(fit.r_squared, kTrace)
            << "\n";
  return kExitOk;
}

struct MixSlowArgs {
  int q = 3;
  double beta = 0.0;
  std::vector<int> n_list{64, 128, 256};
  int replicas = 32;
  double cap_factor = 1000.0;
  std::optional<double> radius;
};

int run_mix_slow(const MixSlowArgs& a, Run& run) {
  const auto table = slow_mixing_probe(a.q, a.beta, a.n_list, a.replicas, run.seed, {a.cap_factor, a.radius});
  std::string csv = "n,mean_escape,stderr,replicas,censored,cap,radius\n";
  json points = json::array();
  for (const EscapePoint& pt : table) {
    csv += std::to_string(pt.n) + "," + format_number(pt.mean, kExact) + "," + format_number(pt.stderr_, kExact) +
           "," + std::to_string(pt.replicas) + "," + std::to_string(pt.censored) + "," + std::to_string(pt.cap) +
           "," + format_number(pt.radius, kExact) + "\n";
    points.push_back({{"n", pt.n},
                      {"mean_escape", pt.mean},
                      {"stderr", pt.stderr_},
                      {"replicas", pt.replicas},
                      {"censored", pt.censored},
                      {"cap", pt.cap},
                      {"radius", pt.radius}});
  }
  run.write("mix_slow.csv", csv);
  json out = {{"q", a.q},
              {"beta", a.beta},
              {"start", "all spins 0 on both sides"},
              {"escape", "first step with |L(left) - rho|_1 <= radius"},
              {"censoring", "replicas reaching the cap count as the cap; means are lower bounds"},
              {"points", points}};
  run.write("mix_slow.json", out.dump(2) + "\n");
  for (const EscapePoint& pt : table)
    std::cout << "n " << pt.n << ": mean escape " << format_number(pt.mean, kTrace) << " (" << pt.censored
              << " censored)\n";
  return kExitOk;
}

// ---------------------------------------------------------------- verify

int run_verify(const std::string& suite, Run& run) {
  const VerifyReport report = verify_suite(suite, run.seed);
  run.write("verify.json", to_json(report).dump(2) + "\n");
  for (const Check& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.suite << ": " << c.name << "  measured "
              << format_number(c.measured, 6) << " tol " << format_number(c.tolerance, 3) << "\n";
  }
  std::cout << (report.passed ? "verify: all checks passed\n" : "verify: FAILED\n");
  return report.passed ? kExitOk : kExitVerifyFailed;
}

json option_values(const CLI::App* app) {
  json out = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
    std::vector<std::string> vals = opt->count() > 0 ? opt->results() : std::vector<std::string>{};
    if (vals.empty() && !opt->get_default_str().empty()) vals = {opt->get_default_str()};
    if (vals.empty()) continue;
    const auto parse = [](const std::string& s) {
      json v = json::parse(s, nullptr, false);
      return (v.is_number() || v.is_boolean()) ? v : json(s);
    };
    if (vals.size() == 1) {
      out[opt->get_lnames().front()] = parse(vals.front());
    } else {
      json arr = json::array();
      for (const auto& v : vals) arr.push_back(parse(v));
      out[opt->get_lnames().front()] = arr;
    }
  }
  return out;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"Potts model on the complete bipartite graph K_{n,n}: phases, dynamics and mixing"};
  app.name("potts");
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values; nested objects address subcommands");
  app.allow_config_extras(CLI::config_extras_mode::error);

  std::string out_dir = ".";
  int threads = 0;
  std::uint64_t seed = 1;
  app.add_option("--out-dir", out_dir, "Output directory")->envname("POTTS_OUT_DIR")->capture_default_str();
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "Base seed for all random streams")->capture_default_str();

  std::function<int(Run&)> action;
  std::string stem;

  PhaseArgs pa;
  auto* phase = app.add_subcommand("phase", "Critical points, s(beta) and equilibrium macrostates");
  phase->add_option("--q", pa.q, "Number of spin states (>= 3)")->required()->check(CLI::Range(3, kMaxSpinStates));
  phase->add_option("--beta", pa.beta, "Report macrostates at this beta")->check(CLI::NonNegativeNumber);
  phase->add_flag("--sweep", pa.sweep, "Write phase_sweep.csv over [beta-min, beta-max]");
  phase->add_option("--beta-min", pa.beta_min)->capture_default_str()->check(CLI::NonNegativeNumber);
  phase->add_option("--beta-max", pa.beta_max, "Default 2 beta_c");
  phase->add_option("--steps", pa.steps)->capture_default_str();
  phase->add_flag("--landscape", pa.landscape, "Write alpha and the rate function on a diagonal grid (needs --beta)");
  phase->add_option("--grid", pa.grid, "Landscape grid denominator")->capture_default_str()->check(CLI::PositiveNumber);
  phase->callback([&] {
    stem = "phase";
    action = [&](Run& r) { return run_phase(pa, r); };
  });

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Run one Glauber chain and record magnetizations");
  simulate->add_option("--q", sa.q)->required()->check(CLI::Range(2, kMaxSpinStates));
  simulate->add_option("--n", sa.n)->required()->check(CLI::PositiveNumber);
  simulate->add_option("--beta", sa.beta)->required()->check(CLI::NonNegativeNumber);
  simulate->add_option("--steps", sa.steps)->capture_default_str();
  simulate->add_option("--record-every", sa.record_every)->capture_default_str();
  simulate->add_option("--init", sa.init, "uniform | ordered:k | path to a two-row spin file")->capture_default_str();
  simulate->callback([&] {
    stem = "simulate";
    action = [&](Run& r) { return run_simulate(sa, r); };
  });

  CoupleArgs ca;
  auto* couple = app.add_subcommand("couple", "Greedy coupling replicas");
  couple->add_option("--q", ca.q)->required()->check(CLI::Range(2, kMaxSpinStates));
  couple->add_option("--n", ca.n)->required()->check(CLI::PositiveNumber);
  couple->add_option("--beta", ca.beta)->required()->check(CLI::NonNegativeNumber);
  couple->add_option("--replicas", ca.replicas)->capture_default_str();
  couple->add_option("--t-max", ca.t_max, "Step ceiling (default ceil(200 n log n))");
  couple->add_option("--init-x", ca.init_x)->capture_default_str();
  couple->add_option("--init-y", ca.init_y)->capture_default_str();
  couple->add_option("--trace-stride", ca.trace_stride, "Write couple_traces.csv every k steps (0 = off)")
      ->capture_default_str();
  couple->callback([&] {
    stem = "couple";
    action = [&](Run& r) { return run_couple(ca, r); };
  });

  PathsArgs ya;
  auto* paths = app.add_subcommand("paths", "Aggregate path coupling contraction near rho");
  paths->add_option("--q", ya.q)->required()->check(CLI::Range(2, kMaxSpinStates));
  paths->add_option("--beta", ya.beta)->required()->check(CLI::NonNegativeNumber);
  paths->add_option("--samples", ya.samples)->capture_default_str()->check(CLI::PositiveNumber);
  paths->add_option("--radius", ya.radius, "End points within this l1 radius of (rho, rho)")->capture_default_str();
  paths->add_option("--grid", ya.grid, "Diagonal start grid with end (rho, rho) instead of samples")
      ->capture_default_str();
  paths->add_option("--lipschitz-radius", ya.lipschitz_radius)->capture_default_str();
  paths->add_option("--lipschitz-samples", ya.lipschitz_samples)->capture_default_str();
  paths->callback([&] {
    stem = "paths";
    action = [&](Run& r) { return run_paths(ya, r); };
  });

  auto* mix = app.add_subcommand("mix", "Mixing-time measurements");
  mix->require_subcommand(1, 1);

  MixExactArgs ea;
  auto* exact = mix->add_subcommand("exact", "Exact distance to equilibrium on the projected chain");
  exact->add_option("--q", ea.q)->capture_default_str()->check(CLI::Range(2, kMaxSpinStates));
  exact->add_option("--n", ea.n)->capture_default_str()->check(CLI::PositiveNumber);
  exact->add_option("--beta", ea.beta)->capture_default_str()->check(CLI::NonNegativeNumber);
  exact->add_option("--t-max", ea.t_max)->capture_default_str();
  exact->add_option("--max-states", ea.max_states, "Cap on projected chain states")->capture_default_str();
  exact->add_option("--coupling-replicas", ea.coupling_replicas, "Add the coupling upper bound (0 = off)")
      ->capture_default_str();
  exact->callback([&] {
    stem = "mix_exact";
    action = [&](Run& r) { return run_mix_exact(ea, r); };
  });

  MixScalingArgs sc;
  auto* scaling = mix->add_subcommand("scaling", "Coupling time against n log n");
  scaling->add_option("--q", sc.q)->capture_default_str()->check(CLI::Range(2, kMaxSpinStates));
  scaling->add_option("--beta", sc.beta)->required()->check(CLI::NonNegativeNumber);
  scaling->add_option("--n-list", sc.n_list)->capture_default_str()->delimiter(',');
  scaling->add_option("--replicas", sc.replicas)->capture_default_str()->check(CLI::PositiveNumber);
  scaling->add_option("--t-max-factor", sc.t_max_factor, "Ceiling in units of n log n")->capture_default_str();
  scaling->callback([&] {
    stem = "mix_scaling";
    action = [&](Run& r) { return run_mix_scaling(sc, r); };
  });

  MixSlowArgs sl;
  auto* slow = mix->add_subcommand("slow", "Escape time from an ordered start");
  slow->add_option("--q", sl.q)->capture_default_str()->check(CLI::Range(3, kMaxSpinStates));
  slow->add_option("--beta", sl.beta)->required()->check(CLI::NonNegativeNumber);
  slow->add_option("--n-list", sl.n_list)->capture_default_str()->delimiter(',');
  slow->add_option("--replicas", sl.replicas)->capture_default_str()->check(CLI::PositiveNumber);
  slow->add_option("--cap-factor", sl.cap_factor, "Cap in units of n log n")->capture_default_str();
  slow->add_option("--radius", sl.radius, "Escape radius around rho (default from s(beta))");
  slow->callback([&] {
    stem = "mix_slow";
    action = [&](Run& r) { return run_mix_slow(sl, r); };
  });

  std::string suite = "all";
  auto* verify = app.add_subcommand("verify", "Oracle comparisons; exit 1 when any check fails");
  std::vector<std::string> allowed = suite_names();
  allowed.push_back("all");
  verify->add_option("--suite", suite)->capture_default_str()->check(CLI::IsMember(allowed));
  verify->callback([&] {
    stem = "verify";
    action = [&](Run& r) { return run_verify(suite, r); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (threads > 0) omp_set_num_threads(threads);
  Run run;
  run.out_dir = out_dir;
  run.seed = seed;
  const std::string started = utc_now();
  int code = kExitOk;
  try {
    code = action(run);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParameterError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FeasibilityError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    for (const auto& line : e.trace()) std::cerr << "  " << line << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  json parameters = option_values(&app);
  parameters.erase("config");
  const CLI::App* leaf = app.get_subcommands().front();
  std::string command = leaf->get_name();
  while (!leaf->get_subcommands().empty()) {
    leaf = leaf->get_subcommands().front();
    command += " " + leaf->get_name();
  }
  for (const CLI::App* sub = app.get_subcommands().front();; sub = sub->get_subcommands().front()) {
    const json values = option_values(sub);
    for (auto& [k, v] : values.items()) parameters[k] = v;
    if (sub->get_subcommands().empty()) break;
  }
  json outputs = json::array();
  for (const std::string& name : run.outputs) {
    const fs::path p = run.out_dir / name;
    outputs.push_back({{"file", name}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p.string())}});
  }
  json manifest = {{"command_line", std::vector<std::string>(argv, argv + argc)},
                   {"command", command},
                   {"parameters", parameters},
                   {"seed", seed},
                   {"threads", threads > 0 ? threads : omp_get_max_threads()},
                   {"version", POTTS_VERSION},
                   {"started_at", started},
                   {"finished_at", utc_now()},
                   {"exit_code", code},
                   {"outputs", outputs}};
  run.write(stem + ".manifest.json", manifest.dump(2) + "\n");
  return code;
}

}  // namespace potts::cli
