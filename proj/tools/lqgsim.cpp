// Command-line front end: one subcommand per campaign kind.
#include <cmath>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "lqg/error.hpp"
#include "lqg/io.hpp"
#include "lqg/rng.hpp"
#include "lqg/special.hpp"

using nlohmann::json;
using namespace lqg;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kNumeric = 3, kCapacity = 4 };

struct Flags {
  std::string config_path;
  double q = 0, cm = 0, epsilon = 0;
  int ladder_steps = 0, replicas = 0, depth_cap = 0, domain_level = 0, workers = 0, r_min = 0, r_max = 0;
  std::uint64_t seed = 0, node_budget = 0;
  std::string backend, out, fractal;
  std::vector<double> z, w, center;
  bool plot = false;
  json layer = json::object();
};

void add_flags(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config_path, "JSON configuration file");
  sub.add_option("--q", f.q, "background charge Q");
  sub.add_option("--cm", f.cm, "matter central charge c_M (< 25)");
  sub.add_option("--epsilon", f.epsilon, "mass threshold, or the largest one of a ladder");
  sub.add_option("--ladder-steps", f.ladder_steps, "number of halvings of epsilon");
  sub.add_option("--replicas", f.replicas, "independent field realizations");
  sub.add_option("--seed", f.seed, "base seed");
  sub.add_option("--depth-cap", f.depth_cap, "deepest subdivision level");
  sub.add_option("--backend", f.backend, "field backend")->check(CLI::IsMember({"exact", "octave", "stub"}));
  sub.add_option("--domain-level", f.domain_level, "domain is the dyadic square [0, 2^-level]^2");
  sub.add_option("--out", f.out, "output file");
  sub.add_option("--workers", f.workers, "worker threads");
  sub.add_option("--fractal", f.fractal, "fractal descriptor, e.g. segment:1/2");
  sub.add_option("--z", f.z, "first point x y")->expected(2);
  sub.add_option("--w", f.w, "second point x y")->expected(2);
  sub.add_option("--center", f.center, "ball center x y")->expected(2);
  sub.add_option("--r-min", f.r_min, "smallest ball radius");
  sub.add_option("--r-max", f.r_max, "largest ball radius");
  sub.add_option("--node-budget", f.node_budget, "squares a graph search may explore");
  sub.add_flag("--plot", f.plot, "also write a .dat/.gp plot pair");
}

json flag_layer(const CLI::App& sub, const Flags& f) {
  json j = json::object();
  auto given = [&](const char* name) { return sub.count(name) > 0; };
  if (given("--q")) j["q"] = f.q;
  if (given("--cm")) j["c_m"] = f.cm;
  if (given("--epsilon")) j["epsilon"] = f.epsilon;
  if (given("--ladder-steps")) j["ladder_steps"] = f.ladder_steps;
  if (given("--replicas")) j["replicas"] = f.replicas;
  if (given("--seed")) j["seed"] = f.seed;
  if (given("--depth-cap")) j["depth_cap"] = f.depth_cap;
  if (given("--backend")) j["backend"] = f.backend;
  if (given("--domain-level")) j["domain_level"] = f.domain_level;
  if (given("--out")) j["out"] = f.out;
  if (given("--workers")) j["workers"] = f.workers;
  if (given("--fractal")) j["fractal"] = f.fractal;
  if (given("--z")) j["z"] = f.z;
  if (given("--w")) j["w"] = f.w;
  if (given("--center")) j["center"] = f.center;
  if (given("--r-min")) j["r_min"] = f.r_min;
  if (given("--r-max")) j["r_max"] = f.r_max;
  if (given("--node-budget")) j["node_budget"] = f.node_budget;
  if (given("--plot")) j["plot"] = f.plot;
  return j;
}

RunConfig load(const std::string& command, const CLI::App& sub, const Flags& f) {
  std::vector<json> layers;
  if (!f.config_path.empty()) layers.push_back(parse_layer(read_file(f.config_path), f.config_path));
  layers.push_back(env_layer(process_environment()));
  layers.push_back(flag_layer(sub, f));
  return resolve_config(command, layers);
}

std::string output_path(const RunConfig& c, const std::string& fallback) { return c.out.empty() ? fallback : c.out; }

std::string plot_prefix(const std::string& path) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return path.substr(0, dot);
  return path;
}

json fit_json(const ExponentFit& f) {
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"slope", num(f.slope)},   {"stderr", num(f.stderr_slope)}, {"r2", num(f.r2)},
          {"points", f.points.size()}, {"censored", f.censored},       {"replicas", f.replicas},
          {"reportable", f.reportable}};
}

int run_tile(const RunConfig& c, json& summary) {
  const auto field = make_field(c.campaign(), c.seed);
  const Tiling t = subdivide(c.domain(), c.epsilon, *field, c.params, c.depth_cap);
  const auto path = output_path(c, "tiling.txt");
  dump_tiling(t, path);
  summary["squares"] = t.squares.size();
  summary["unresolved"] = t.unresolved.size();
  summary["max_side"] = t.squares.empty() ? json(nullptr) : json(max_side(t));
  summary["output"] = path;
  return kOk;
}

int run_distance(const RunConfig& c, const std::string& hash, json& summary) {
  PtpResult result;
  result.rows.resize(static_cast<std::size_t>(c.replicas));
  const auto campaign = c.campaign();
  parallel_for(c.replicas, c.workers, [&](int r) {
    const auto field = make_field(campaign, derive_seed(c.seed, static_cast<std::uint64_t>(r)));
    const Tiling t = subdivide(c.domain(), c.epsilon, *field, c.params, c.depth_cap);
    const auto g = build_adjacency(t);
    const auto d = distance(g, c.z, c.w);
    result.rows[static_cast<std::size_t>(r)] = {c.epsilon, r, d ? *d : -1, !d.has_value()};
  });
  const auto path = output_path(c, "distance.csv");
  emit_csv(ptp_table(result), hash, path);
  json distances = json::array();
  for (const auto& row : result.rows) distances.push_back(row.censored ? json(nullptr) : json(row.distance));
  summary["distances"] = distances;
  summary["output"] = path;
  return kOk;
}

int run_kpz_command(const RunConfig& c, const std::string& hash, json& summary) {
  const auto x = FractalSet::parse(c.fractal);
  const auto result = run_kpz(x, c.ladder(), c.campaign());
  const auto path = output_path(c, "kpz.csv");
  emit_csv(kpz_table(result), hash, path);
  summary["fit"] = fit_json(result.fit);
  summary["prediction"] = result.prediction.infinite ? json("infinite") : json(result.prediction.exponent);
  summary["at_boundary"] = result.prediction.at_boundary;
  summary["unresolved_fraction"] = result.unresolved_fraction;
  summary["output"] = path;
  if (c.plot) emit_plot(result.fit.points, "log(1/epsilon)", "log mean count", hash, plot_prefix(path));
  return kOk;
}

int run_measure_command(const RunConfig& c, const std::string& hash, json& summary) {
  const auto x = FractalSet::parse(c.fractal);
  const auto result = run_measure(x, c.ladder(), c.campaign());
  const auto path = output_path(c, "measure.csv");
  emit_csv(measure_table(result), hash, path);
  summary["exponent"] = result.exponent;
  summary["output"] = path;
  if (c.plot) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : result.rows) pts.emplace_back(std::log(1.0 / row.epsilon), row.mean);
    emit_plot(pts, "log(1/epsilon)", "rescaled count", hash, plot_prefix(path));
  }
  return kOk;
}

int run_ball_command(const RunConfig& c, const std::string& hash, json& summary) {
  const auto radii = geometric_radii(c.r_min, c.r_max);
  const auto result = run_ball_growth(c.epsilon, radii, c.center, c.replicas, c.seed, c.campaign());
  const auto path = output_path(c, "ball.csv");
  emit_csv(ball_table(result), hash, path);
  json med = json::array();
  for (double e : result.median_exponent) med.push_back(std::isfinite(e) ? json(e) : json(nullptr));
  summary["radii"] = radii;
  summary["median_exponent"] = med;
  summary["censored"] = result.censored;
  if (result.dimension_guess) summary["reference_dimension_guess"] = *result.dimension_guess;
  if (result.watabiki) summary["reference_watabiki"] = *result.watabiki;
  summary["output"] = path;
  if (c.plot) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < radii.size(); ++i)
      if (std::isfinite(result.median_exponent[i])) pts.emplace_back(std::log(radii[i]), result.median_exponent[i]);
    emit_plot(pts, "log r", "median log #B_r / log r", hash, plot_prefix(path));
  }
  return kOk;
}

int run_ptp_command(const RunConfig& c, const std::string& hash, json& summary) {
  const auto result = run_ptp_distance(c.z, c.w, c.ladder(), c.campaign());
  const auto path = output_path(c, "ptp.csv");
  emit_csv(ptp_table(result), hash, path);
  summary["fit"] = fit_json(result.fit);
  summary["lower_bound"] = result.lower_bound;
  summary["above_lower_bound"] = result.above_lower_bound;
  summary["output"] = path;
  if (c.plot) emit_plot(result.fit.points, "log(1/epsilon)", "log mean distance", hash, plot_prefix(path));
  return kOk;
}

// Compares the closed-form covariance with direct quadrature.
int run_field_check(const RunConfig& c, json& summary) {
  double worst_diag = 0.0, worst_off = 0.0;
  for (int n = 0; n < 20; ++n) {
    const double t = std::ldexp(1.0, -n);
    const FieldNode a{{0.5, 0.5}, t};
    worst_diag = std::max(worst_diag, std::abs(wn_covariance(a, a) - std::log(1.0 / t)));
  }
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto u = Philox4x64::block({i, 0, 0, 0}, {c.seed, static_cast<std::uint64_t>(Stream::kTest)});
    const Point z(uniform_open0(u[0]), uniform_open0(u[1]));
    const Point w(uniform_open0(u[2]), uniform_open0(u[3]));
    const double t = std::ldexp(1.0, -static_cast<int>(i % 12));
    const double cov = wn_covariance({z, t}, {w, t});
    const double quad = heat_kernel_integral((z - w).norm(), t * t);
    worst_off = std::max(worst_off, std::abs(cov - quad));
  }
  const bool pass = worst_diag <= 1e-10 && worst_off <= 1e-8;
  summary["diagonal_max_error"] = worst_diag;
  summary["offdiagonal_max_error"] = worst_off;
  summary["pass"] = pass;
  return pass ? kOk : kNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dyadic tilings of log-correlated fields: tiling, graph distance and scaling campaigns"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> commands{
      {"tile", "subdivide the domain once and dump the tiling"},
      {"distance", "graph distance between --z and --w on full tilings"},
      {"ball", "ball volume growth around --center"},
      {"kpz", "quantum box counts of a fractal over an epsilon ladder"},
      {"measure", "rescaled quantum counts over an epsilon ladder"},
      {"ptp", "point-to-point distance scaling over an epsilon ladder"},
      {"field-check", "covariance self-test against quadrature"}};
  Flags flags;
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    add_flags(*sub, flags);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  CLI::App* sub = nullptr;
  for (auto* s : subs)
    if (s->parsed()) sub = s;
  const std::string command = sub->get_name();
  try {
    const RunConfig c = load(command, *sub, flags);
    const std::string hash = config_hash(c);
    json summary{{"command", command}, {"config_hash", hash}, {"tool_version", kToolVersion}};
    int rc = kOk;
    if (command == "tile") rc = run_tile(c, summary);
    else if (command == "distance") rc = run_distance(c, hash, summary);
    else if (command == "kpz") rc = run_kpz_command(c, hash, summary);
    else if (command == "measure") rc = run_measure_command(c, hash, summary);
    else if (command == "ball") rc = run_ball_command(c, hash, summary);
    else if (command == "ptp") rc = run_ptp_command(c, hash, summary);
    else if (command == "field-check") rc = run_field_check(c, summary);
    std::cout << summary.dump(2) << '\n';
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kConfig;
  } catch (const CapacityError& e) {
    std::cerr << "capacity exceeded: " << e.what() << '\n';
    return kCapacity;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const ExperimentError& e) {
    std::cerr << "experiment failed: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
