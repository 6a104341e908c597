#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "lqg/error.hpp"
#include "lqg/field.hpp"
#include "lqg/io.hpp"

using namespace lqg;
using nlohmann::json;

namespace {

const DyadicSquare kUnit{0, 0, 0};

std::string scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "lqg-test-io";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text, "kpz");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal configuration fills defaults") {
  const auto c = parse_config(R"({"q": 2, "epsilon": 2e-3, "seed": 7})", "kpz");
  CHECK(c.params.q == 2.0);
  CHECK(c.epsilon == 2e-3);
  CHECK(c.seed == 7);
  CHECK(c.depth_cap == 24);
  CHECK(c.replicas == 1);
  CHECK(c.backend == Backend::kOctave);
  CHECK(c.fractal == "segment:1/2");
  const auto again = parse_config(R"({"seed": 7, "epsilon": 0.002, "q": 2.0})", "kpz");
  CHECK(config_hash(c) == config_hash(again));
  CHECK(config_hash(c).size() == 32);
  CHECK(config_hash(c) != config_hash(parse_config(R"({"q": 2, "epsilon": 2e-3, "seed": 8})", "kpz")));
  CHECK(config_hash(c) != config_hash(parse_config(R"({"q": 2, "epsilon": 2e-3, "seed": 7})", "ptp")));
}

TEST_CASE("central charge resolves to the background charge") {
  const auto a = parse_config(R"({"c_m": 19})", "kpz");
  CHECK(a.params.q == 1.0);
  CHECK(config_hash(a) == config_hash(parse_config(R"({"q": 1})", "kpz")));
  CHECK_THROWS_AS(parse_config(R"({"c_m": 30})"), DomainError);
  CHECK_THROWS_AS(parse_config(R"({"c_m": 25})"), DomainError);
}

TEST_CASE("execution settings do not change the hash") {
  const auto a = parse_config(R"({"q": 1.5, "workers": 1})", "ball");
  const auto b = parse_config(R"({"q": 1.5, "workers": 8, "out": "/tmp/x.csv", "plot": true})", "ball");
  CHECK(config_hash(a) == config_hash(b));
}

TEST_CASE("every invalid key is reported") {
  const auto msg = config_error(R"({"q": -1, "epsilon": "small", "replicas": 0, "colour": 3, "backend": "gpu"})");
  for (const char* key : {"q:", "epsilon:", "replicas:", "colour:", "backend:"}) {
    CAPTURE(key);
    CHECK(msg.find(key) != std::string::npos);
  }
  CHECK(config_error(R"({"c_m": 1, "q": 2})").find("c_m and q") != std::string::npos);
  CHECK(config_error(R"({"fractal": "blob"})").find("fractal:") != std::string::npos);
  CHECK(config_error(R"({"z": [1]})").find("z:") != std::string::npos);
  CHECK(config_error(R"({"r_min": 64, "r_max": 8})").find("r_max") != std::string::npos);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("later layers override earlier ones") {
  const auto file = parse_layer(R"({"q": 1.5, "seed": 3, "depth_cap": 12})", "file");
  const auto env = env_layer({{"LQG_DEPTH_CAP", "18"}, {"LQG_BACKEND", "stub"}, {"OTHER", "1"}});
  CHECK(env == json{{"depth_cap", 18}, {"backend", "stub"}});
  const json flags{{"c_m", 19}};
  const auto c = resolve_config("kpz", {file, env, flags});
  CHECK(c.depth_cap == 18);
  CHECK(c.backend == Backend::kStub);
  CHECK(c.seed == 3);
  CHECK(c.params.q == 1.0);  // c_m from a later layer replaces the file's q
  CHECK_FALSE(c.q.has_value());
}

TEST_CASE("FNV-1a 128 reference digests") {
  CHECK(fnv1a_128("") == "6c62272e07bb014262b821756295c58d");
  CHECK(fnv1a_128("a") == "d228cb696f1a8caf78912b704e4a8964");
  CHECK(fnv1a_128("foobar") == "343e1662793c64bf6f0d3597ba446f18");
}

TEST_CASE("tiling dump round-trips") {
  const auto uniform = subdivide(kUnit, 0.3, *constant_field(0.0), params_from_q(1.0), 24);
  const auto path = scratch("uniform.tiling");
  dump_tiling(uniform, path);
  CHECK(load_tiling(path) == uniform);

  const auto field = sample_octave(kUnit, 9, 31);
  const auto sampled = subdivide(kUnit, 1.0 / 32, *field, params_from_q(1.1), 9);
  REQUIRE_FALSE(sampled.unresolved.empty());
  const auto text = format_tiling(sampled);
  CHECK(parse_tiling(text) == sampled);
  CHECK(format_tiling(parse_tiling(text)) == text);

  const auto sing = subdivide(kUnit, 0.3, *with_log_singularity(constant_field(0.0), 1.5, {0.5, 0.5}),
                              params_from_q(1.0), 6);
  CHECK(parse_tiling(format_tiling(sing)) == sing);

  auto records = lines(text);
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].rfind("records", 0) == 0) {
      const auto& first = records[i + 1];
      CHECK(first.back() == 'A');
      break;
    }
  }
  CHECK_THROWS_AS(parse_tiling("not a tiling"), ConfigError);
  CHECK_THROWS_AS(parse_tiling(text.substr(0, text.size() - 20)), ConfigError);
  CHECK_THROWS_WITH_AS(load_tiling(scratch("missing.tiling")), doctest::Contains("missing.tiling"),
                       std::runtime_error);
}

TEST_CASE("CSV layout") {
  KpzResult empty;
  const auto header_only = format_csv(kpz_table(empty), "abc");
  CHECK(lines(header_only) ==
        std::vector<std::string>{"# tool_version: lqgsim 0.1.0", "# config_hash: abc",
                                 "epsilon,replica,count,unresolved_hits"});

  Campaign c;
  c.params = params_from_q(1.0);
  c.backend = Backend::kStub;
  const auto r = run_kpz(FractalSet::horizontal_segment({1, 2}), {0.25, 2, 2, 0}, c);
  const auto csv = lines(format_csv(kpz_table(r), "h"));
  REQUIRE(csv.size() == 3 + 6);
  CHECK(csv[3] == "0.25,0,8,0");
  CHECK(csv[8] == "0.0625,1,32,0");

  CHECK(ball_table(BallResult{}).columns == std::vector<std::string>{"radius", "replica", "count", "truncated"});
  CHECK(ptp_table(PtpResult{}).columns == std::vector<std::string>{"epsilon", "replica", "distance", "censored"});
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(std::ldexp(1.0, -14)) == "6.103515625e-05");

  const auto path = scratch("kpz.csv");
  emit_csv(kpz_table(r), "h", path);
  CHECK(read_file(path) == format_csv(kpz_table(r), "h"));
  CHECK_THROWS_WITH_AS(emit_csv(kpz_table(r), "h", "/nonexistent-dir/out.csv"),
                       doctest::Contains("/nonexistent-dir/out.csv"), std::runtime_error);
}

TEST_CASE("plot files carry the hash") {
  const auto prefix = scratch("fig");
  emit_plot({{1.0, 2.0}, {2.0, 3.5}}, "log 1/eps", "log N", "h123", prefix);
  const auto dat = read_file(prefix + ".dat");
  CHECK(dat.find("# config_hash: h123") != std::string::npos);
  CHECK(dat.find("2 3.5") != std::string::npos);
  const auto gp = read_file(prefix + ".gp");
  CHECK(gp.find("fig.dat") != std::string::npos);
  CHECK(gp.find("h123") != std::string::npos);
}
