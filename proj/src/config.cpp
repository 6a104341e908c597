#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "lqg/error.hpp"
#include "lqg/io.hpp"

extern char** environ;

namespace lqg {

using nlohmann::json;

namespace {

std::string upper_snake(const std::string& key) {
  std::string out = key;
  for (auto& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

// Collects every problem before failing so the user sees them all at once.
class Validator {
 public:
  explicit Validator(const json& merged) : merged_(merged) {}

  template <class T, class Check>
  void get(const std::string& key, T& target, Check check, const char* expectation) {
    const auto it = merged_.find(key);
    if (it == merged_.end()) return;
    try {
      T value = it->template get<T>();
      if (!check(value)) throw std::invalid_argument("");
      target = value;
    } catch (const std::exception&) {
      problems_.push_back(key + ": expected " + expectation + ", got " + it->dump());
    }
  }

  void integer(const std::string& key, int& target, long lo, long hi) {
    const auto it = merged_.find(key);
    if (it == merged_.end()) return;
    if (!it->is_number_integer() || it->get<long>() < lo || it->get<long>() > hi) {
      problems_.push_back(key + ": expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "], got " + it->dump());
      return;
    }
    target = static_cast<int>(it->get<long>());
  }

  void unsigned_integer(const std::string& key, std::uint64_t& target) {
    const auto it = merged_.find(key);
    if (it == merged_.end()) return;
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<long long>() >= 0)) {
      problems_.push_back(key + ": expected a non-negative integer, got " + it->dump());
      return;
    }
    target = it->get<std::uint64_t>();
  }

  void point(const std::string& key, Point& target) {
    const auto it = merged_.find(key);
    if (it == merged_.end()) return;
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
      problems_.push_back(key + ": expected [x, y], got " + it->dump());
      return;
    }
    target = Point((*it)[0].get<double>(), (*it)[1].get<double>());
  }

  void problem(std::string p) { problems_.push_back(std::move(p)); }
  bool ok() const { return problems_.empty(); }
  void raise() const {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems_) msg += "\n  " + p;
    throw ConfigError(msg);
  }

 private:
  const json& merged_;
  std::vector<std::string> problems_;
};

}  // namespace

Campaign RunConfig::campaign() const {
  Campaign c;
  c.params = params;
  c.backend = backend;
  c.domain = domain();
  c.depth_cap = depth_cap;
  c.workers = workers;
  c.node_budget = node_budget;
  return c;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "backend", "c_m",      "center",  "depth_cap", "domain_level", "epsilon", "fractal", "ladder_steps", "node_budget",
      "out",     "plot",     "q",       "r_max",     "r_min",        "replicas", "seed",   "w",            "workers",
      "z"};
  return keys;
}

RunConfig resolve_config(const std::string& command, const std::vector<json>& layers) {
  json merged = json::object();
  std::vector<std::string> unknown;
  std::vector<std::string> conflicts;
  const auto& keys = config_keys();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    if (!layer.is_object()) throw ConfigError("configuration must be a JSON object");
    if (layer.contains("c_m") && layer.contains("q"))
      conflicts.push_back("c_m and q are both given; they determine each other, give one");
    if (layer.contains("c_m")) merged.erase("q");
    if (layer.contains("q")) merged.erase("c_m");
    for (const auto& [key, value] : layer.items()) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        unknown.push_back(key);
        continue;
      }
      merged[key] = value;
    }
  }

  RunConfig c;
  c.command = command;
  Validator v(merged);
  for (const auto& k : unknown) v.problem(k + ": unknown key");
  for (const auto& k : conflicts) v.problem(k);

  double cm = 0, q = 0;
  bool have_cm = false, have_q = false;
  if (merged.contains("c_m")) {
    v.get<double>("c_m", cm, [](double) { return true; }, "a number");
    have_cm = merged["c_m"].is_number();
  }
  if (merged.contains("q")) {
    v.get<double>("q", q, [](double x) { return x > 0; }, "a positive number");
    have_q = merged["q"].is_number() && q > 0;
  }
  v.get<double>("epsilon", c.epsilon, [](double x) { return x > 0 && x < 1e300; }, "a positive number");
  v.integer("ladder_steps", c.ladder_steps, 0, 60);
  v.integer("replicas", c.replicas, 1, 1'000'000);
  v.unsigned_integer("seed", c.seed);
  v.integer("depth_cap", c.depth_cap, 1, 40);
  {
    std::string backend = to_string(c.backend);
    v.get<std::string>("backend", backend,
                       [](const std::string& b) { return b == "exact" || b == "octave" || b == "stub"; },
                       "one of exact, octave, stub");
    c.backend = backend_from_string(backend);
  }
  v.integer("domain_level", c.domain_level, -8, 30);
  v.get<std::string>("fractal", c.fractal,
                     [](const std::string& f) {
                       FractalSet::parse(f);
                       return true;
                     },
                     "a fractal descriptor such as segment:1/2");
  v.point("z", c.z);
  v.point("w", c.w);
  v.point("center", c.center);
  v.integer("r_min", c.r_min, 2, 1 << 20);
  v.integer("r_max", c.r_max, 2, 1 << 20);
  v.unsigned_integer("node_budget", c.node_budget);
  v.integer("workers", c.workers, 1, 1024);
  v.get<std::string>("out", c.out, [](const std::string&) { return true; }, "a path");
  v.get<bool>("plot", c.plot, [](bool) { return true; }, "true or false");
  if (c.r_max < c.r_min) v.problem("r_max: must not be smaller than r_min");
  if (c.depth_cap <= c.domain_level) v.problem("depth_cap: must exceed domain_level");
  if (!v.ok()) v.raise();

  if (have_cm) {
    if (!(cm < 25.0)) throw DomainError("c_m must be below 25, got " + merged["c_m"].dump());
    c.c_m = cm;
    c.params = params_from_cm(cm);
  } else if (have_q) {
    c.q = q;
    c.params = params_from_q(q);
  } else {
    c.params = params_from_q(2.0);
  }
  return c;
}

json parse_layer(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(origin + ": configuration must be a JSON object");
  return j;
}

RunConfig parse_config(const std::string& text, const std::string& command) {
  return resolve_config(command, {parse_layer(text, "config")});
}

json env_layer(const std::map<std::string, std::string>& environment) {
  json layer = json::object();
  for (const auto& key : config_keys()) {
    const auto it = environment.find("LQG_" + upper_snake(key));
    if (it == environment.end()) continue;
    // Values are read as JSON when they parse as JSON, otherwise as plain strings.
    const json parsed = json::parse(it->second, nullptr, false);
    layer[key] = parsed.is_discarded() ? json(it->second) : parsed;
  }
  return layer;
}

std::map<std::string, std::string> process_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    const std::string entry(*e);
    const auto eq = entry.find('=');
    if (eq != std::string::npos && entry.rfind("LQG_", 0) == 0) out[entry.substr(0, eq)] = entry.substr(eq + 1);
  }
  return out;
}

std::string canonical_config(const RunConfig& c) {
  json j;  // object keys are kept sorted
  j["command"] = c.command;
  j["q"] = c.params.q;
  j["epsilon"] = c.epsilon;
  j["ladder_steps"] = c.ladder_steps;
  j["replicas"] = c.replicas;
  j["seed"] = c.seed;
  j["depth_cap"] = c.depth_cap;
  j["backend"] = to_string(c.backend);
  j["domain_level"] = c.domain_level;
  j["fractal"] = FractalSet::parse(c.fractal).descriptor();
  j["z"] = {c.z.x(), c.z.y()};
  j["w"] = {c.w.x(), c.w.y()};
  j["center"] = {c.center.x(), c.center.y()};
  j["r_min"] = c.r_min;
  j["r_max"] = c.r_max;
  j["node_budget"] = c.node_budget;
  return j.dump();
}

std::string fnv1a_128(const std::string& bytes) {
  using u128 = unsigned __int128;
  const u128 prime = (static_cast<u128>(0x0000000001000000ULL) << 64) | 0x000000000000013BULL;
  u128 h = (static_cast<u128>(0x6c62272e07bb0142ULL) << 64) | 0x62b821756295c58dULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= prime;
  }
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(h >> 64),
                static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const RunConfig& c) { return fnv1a_128(canonical_config(c)); }

}  // namespace lqg
