#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lqg/error.hpp"
#include "lqg/io.hpp"

namespace lqg {

namespace {

constexpr const char* kTilingMagic = "# lqg-tiling v1";

std::int64_t parse_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ConfigError("tiling file: invalid " + what + " '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ConfigError("tiling file: invalid " + what + " '" + s + "'");
  return v;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing: " + std::strerror(errno));
  f << contents;
  f.close();
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for reading: " + std::strerror(errno));
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Header lines are "key value..." pairs; records follow the "records" line.
std::string format_tiling(const Tiling& t) {
  std::ostringstream out;
  out << kTilingMagic << '\n';
  out << "tool_version " << kToolVersion << '\n';
  out << "params " << format_number(t.params.c_m) << ' ' << format_number(t.params.q) << ' '
      << (t.params.gamma ? format_number(*t.params.gamma) : std::string("none")) << '\n';
  out << "epsilon " << format_number(t.epsilon) << '\n';
  out << "seed " << t.seed << '\n';
  out << "depth_cap " << t.depth_cap << '\n';
  out << "domain " << t.domain.level << ' ' << t.domain.ix << ' ' << t.domain.iy << '\n';
  out << "field_id " << t.field_id << '\n';
  out << "records " << t.squares.size() + t.unresolved.size() << '\n';
  // Merge the two sorted lists so records come out in (level, ix, iy) order.
  std::size_t a = 0, b = 0;
  while (a < t.squares.size() || b < t.unresolved.size()) {
    const bool take_a =
        b == t.unresolved.size() || (a < t.squares.size() && t.squares[a].square < t.unresolved[b].square);
    const Cell& c = take_a ? t.squares[a++] : t.unresolved[b++];
    out << c.square.level << ' ' << c.square.ix << ' ' << c.square.iy << ' ' << format_number(c.mass) << ' '
        << (take_a ? 'A' : 'U') << '\n';
  }
  return out.str();
}

Tiling parse_tiling(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTilingMagic) throw ConfigError("tiling file: missing header line");
  Tiling t;
  std::size_t records = 0;
  bool have_records = false;
  while (!have_records && std::getline(in, line)) {
    const auto sp = line.find(' ');
    const std::string key = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
    std::istringstream fields(rest);
    std::vector<std::string> f;
    for (std::string s; fields >> s;) f.push_back(s);
    auto need = [&](std::size_t n) {
      if (f.size() != n) throw ConfigError("tiling file: malformed '" + key + "' line");
    };
    if (key == "tool_version") {
      continue;
    } else if (key == "params") {
      need(3);
      t.params.c_m = parse_double(f[0], "c_m");
      t.params.q = parse_double(f[1], "q");
      if (f[2] != "none") t.params.gamma = parse_double(f[2], "gamma");
    } else if (key == "epsilon") {
      need(1);
      t.epsilon = parse_double(f[0], "epsilon");
    } else if (key == "seed") {
      need(1);
      t.seed = std::stoull(f[0]);
    } else if (key == "depth_cap") {
      need(1);
      t.depth_cap = static_cast<int>(parse_int(f[0], "depth cap"));
    } else if (key == "domain") {
      need(3);
      t.domain = {static_cast<int>(parse_int(f[0], "level")), parse_int(f[1], "ix"), parse_int(f[2], "iy")};
    } else if (key == "field_id") {
      t.field_id = rest;
    } else if (key == "records") {
      need(1);
      records = static_cast<std::size_t>(parse_int(f[0], "record count"));
      have_records = true;
    } else {
      throw ConfigError("tiling file: unknown header key '" + key + "'");
    }
  }
  if (!have_records) throw ConfigError("tiling file: missing records line");
  for (std::size_t i = 0; i < records; ++i) {
    if (!std::getline(in, line)) throw ConfigError("tiling file: expected " + std::to_string(records) + " records");
    std::istringstream fields(line);
    std::string level, ix, iy, m, flag;
    if (!(fields >> level >> ix >> iy >> m >> flag) || (flag != "A" && flag != "U"))
      throw ConfigError("tiling file: malformed record '" + line + "'");
    const Cell c{{static_cast<int>(parse_int(level, "level")), parse_int(ix, "ix"), parse_int(iy, "iy")},
                 parse_double(m, "mass")};
    (flag == "A" ? t.squares : t.unresolved).push_back(c);
  }
  return t;
}

void dump_tiling(const Tiling& t, const std::string& path) { write_file(path, format_tiling(t)); }

Tiling load_tiling(const std::string& path) {
  try {
    return parse_tiling(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

CsvTable kpz_table(const KpzResult& r) {
  CsvTable t{{"epsilon", "replica", "count", "unresolved_hits"}, {}};
  for (const auto& row : r.rows)
    t.rows.push_back({format_number(row.epsilon), std::to_string(row.replica), std::to_string(row.count),
                      std::to_string(row.unresolved_hits)});
  return t;
}

CsvTable measure_table(const MeasureResult& r) {
  CsvTable t{{"epsilon", "rescaled_mean", "rescaled_min", "rescaled_max"}, {}};
  for (const auto& row : r.rows)
    t.rows.push_back({format_number(row.epsilon), format_number(row.mean), format_number(row.min),
                      format_number(row.max)});
  return t;
}

CsvTable ball_table(const BallResult& r) {
  CsvTable t{{"radius", "replica", "count", "truncated"}, {}};
  for (const auto& row : r.rows)
    t.rows.push_back({std::to_string(row.radius), std::to_string(row.replica), std::to_string(row.count),
                      row.truncated ? "1" : "0"});
  return t;
}

CsvTable ptp_table(const PtpResult& r) {
  CsvTable t{{"epsilon", "replica", "distance", "censored"}, {}};
  for (const auto& row : r.rows)
    t.rows.push_back({format_number(row.epsilon), std::to_string(row.replica), std::to_string(row.distance),
                      row.censored ? "1" : "0"});
  return t;
}

std::string format_csv(const CsvTable& table, const std::string& hash) {
  std::ostringstream out;
  out << "# tool_version: " << kToolVersion << '\n';
  out << "# config_hash: " << hash << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  return out.str();
}

void emit_csv(const CsvTable& table, const std::string& hash, const std::string& path) {
  write_file(path, format_csv(table, hash));
}

void emit_plot(const std::vector<std::pair<double, double>>& points, const std::string& xlabel,
               const std::string& ylabel, const std::string& hash, const std::string& path_prefix) {
  std::ostringstream dat;
  dat << "# tool_version: " << kToolVersion << "\n# config_hash: " << hash << '\n';
  for (const auto& [x, y] : points) dat << format_number(x) << ' ' << format_number(y) << '\n';
  write_file(path_prefix + ".dat", dat.str());

  const auto slash = path_prefix.find_last_of('/');
  const std::string base = slash == std::string::npos ? path_prefix : path_prefix.substr(slash + 1);
  std::ostringstream gp;
  gp << "# config_hash: " << hash << '\n'
     << "set xlabel '" << xlabel << "'\n"
     << "set ylabel '" << ylabel << "'\n"
     << "f(x) = a + b * x\n"
     << "fit f(x) '" << base << ".dat' using 1:2 via a, b\n"
     << "plot '" << base << ".dat' using 1:2 with linespoints title 'data', f(x) title sprintf('slope %.3f', b)\n";
  write_file(path_prefix + ".gp", gp.str());
}

}  // namespace lqg
