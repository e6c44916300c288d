#include "capflow/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace capflow {

ParseError::ParseError(const std::string& origin, int line, const std::string& message)
    : std::runtime_error(origin + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " +
                         message),
      line_(line)
{
}

std::uint64_t fnv1a(const std::string& bytes)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string format_double(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& x)
{
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  x = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size();
}

std::vector<std::string> lines_of(const std::string& text)
{
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

} // namespace

KeyValueDocument KeyValueDocument::parse(const std::string& text, const std::string& origin)
{
  KeyValueDocument doc;
  doc.origin_ = origin;
  std::string section;
  int no = 0;
  for (const std::string& raw : lines_of(text)) {
    ++no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ParseError(origin, no, "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(origin, no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(origin, no, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (doc.entries_.count(full))
      throw ParseError(origin, no,
                       "duplicate key '" + full + "' (first set on line " +
                           std::to_string(doc.entries_[full].line) + ")");
    doc.entries_[full] = {value, no};
  }
  return doc;
}

void KeyValueDocument::fail(const std::string& key, const std::string& message) const
{
  const auto it = entries_.find(key);
  throw ParseError(origin_, it == entries_.end() ? 0 : it->second.line,
                   "'" + key + "': " + message);
}

std::string KeyValueDocument::get_string(const std::string& key, const std::string& fallback) const
{
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second.value;
}

double KeyValueDocument::get_double(const std::string& key, double fallback) const
{
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  double x;
  if (!parse_number(it->second.value, x)) fail(key, "expected a number, got '" + it->second.value + "'");
  return x;
}

long long KeyValueDocument::get_int(const std::string& key, long long fallback) const
{
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& s = it->second.value;
  char* end = nullptr;
  errno = 0;
  const long long x = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || errno != 0 || end != s.c_str() + s.size())
    fail(key, "expected an integer, got '" + s + "'");
  return x;
}

bool KeyValueDocument::get_bool(const std::string& key, bool fallback) const
{
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& s = it->second.value;
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  fail(key, "expected true or false, got '" + s + "'");
}

std::vector<double> KeyValueDocument::get_list(const std::string& key) const
{
  std::vector<double> out;
  const auto it = entries_.find(key);
  if (it == entries_.end() || it->second.value.empty()) return out;
  for (const std::string& item : split(it->second.value, ',')) {
    double x;
    if (!parse_number(item, x)) fail(key, "list item '" + item + "' is not a number");
    out.push_back(x);
  }
  return out;
}

void KeyValueDocument::reject_unknown(const std::vector<std::string>& known) const
{
  for (const auto& [key, entry] : entries_) {
    bool ok = false;
    for (const std::string& k : known) ok = ok || k == key;
    if (!ok) fail(key, "unknown key");
  }
}

std::string KeyValueDocument::canonical() const
{
  std::string out;
  for (const auto& [key, entry] : entries_) out += key + " = " + entry.value + "\n";
  return out;
}

void KeyValueDocument::set(const std::string& key, const std::string& value)
{
  entries_[key].value = value;
}

std::vector<std::string> trajectory_columns(int n)
{
  std::vector<std::string> cols{"t", "dt"};
  for (int k = 0; k <= n + 1; ++k) cols.push_back("V" + std::to_string(k));
  for (const char* c : {"F_min", "F_max", "kappa_min", "kappa_max", "H_max", "support_min", "r_in",
                        "r_out", "max_speed", "bc_residual"})
    cols.emplace_back(c);
  for (int k = 1; k <= n; ++k) cols.push_back("minkowski_k" + std::to_string(k));
  return cols;
}

namespace {

std::string schema_line(const std::vector<std::string>& cols)
{
  std::string s;
  for (std::size_t i = 0; i < cols.size(); ++i) s += (i ? "," : "") + cols[i];
  return s;
}

} // namespace

std::string trajectory_csv(const FlowTrajectory& trajectory, std::uint64_t config_hash)
{
  const std::vector<std::string> cols = trajectory_columns();
  const std::string schema = schema_line(cols);
  std::string out;
  out += std::string("# ") + version_string + "\n";
  out += "# config_hash " + hex64(config_hash) + "\n";
  out += "# schema " + schema + "\n";
  out += schema + "\n";
  for (const Sample& s : trajectory.samples) {
    const Monitors& m = s.monitors;
    std::vector<double> row{s.t, s.dt};
    row.insert(row.end(), s.quermass.V.begin(), s.quermass.V.end());
    for (double x : {m.F_min, m.F_max, m.kappa_min, m.kappa_max, m.H_max, m.support_min, m.r_in,
                     m.r_out, m.max_speed, m.bc_residual})
      row.push_back(x);
    row.insert(row.end(), s.minkowski.begin(), s.minkowski.end());
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_double(row[i]);
    out += "\n";
  }
  return out;
}

std::vector<double> TrajectoryTable::column(const std::string& name) const
{
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) {
      std::vector<double> out;
      out.reserve(rows.size());
      for (const auto& r : rows) out.push_back(r[c]);
      return out;
    }
  throw std::out_of_range("trajectory has no column " + name);
}

TrajectoryTable parse_trajectory_csv(const std::string& text, const std::string& origin)
{
  const std::vector<std::string> lines = lines_of(text);
  TrajectoryTable table;
  auto header = [&](int i, const std::string& prefix) {
    if (static_cast<int>(lines.size()) <= i || lines[i].rfind(prefix, 0) != 0)
      throw ParseError(origin, i + 1, "expected header line starting with '" + prefix + "'");
    return lines[i].substr(prefix.size());
  };
  table.version = header(0, "# ");
  if (table.version.rfind("capflow ", 0) != 0)
    throw ParseError(origin, 1, "not a capflow file: '" + table.version + "'");
  table.config_hash = header(1, "# config_hash ");
  const std::string schema = header(2, "# schema ");
  if (lines.size() < 4 || lines[3] != schema)
    throw ParseError(origin, 4, "column row does not match the schema line");
  table.columns = split(schema, ',');
  const std::vector<std::string> expected = trajectory_columns();
  if (table.columns != expected) {
    std::string missing;
    for (const std::string& c : expected) {
      bool found = false;
      for (const std::string& d : table.columns) found = found || c == d;
      if (!found) missing += (missing.empty() ? "" : ", ") + c;
    }
    throw ParseError(origin, 3,
                     "schema mismatch" + (missing.empty() ? std::string(" (column order)")
                                                          : "; missing columns: " + missing));
  }
  for (std::size_t i = 4; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::vector<std::string> cells = split(lines[i], ',');
    if (cells.size() != table.columns.size())
      throw ParseError(origin, static_cast<int>(i + 1),
                       "expected " + std::to_string(table.columns.size()) + " fields, got " +
                           std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      if (!parse_number(cells[c], row[c]))
        throw ParseError(origin, static_cast<int>(i + 1),
                         "field '" + table.columns[c] + "' is not a number: '" + cells[c] + "'");
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string serialize_state(const RadialField& state, double t, std::uint64_t config_hash)
{
  std::string out;
  out += std::string("# ") + version_string + " state\n";
  out += "# config_hash " + hex64(config_hash) + "\n";
  out += "theta = " + format_double(state.theta) + "\n";
  out += "n_beta = " + std::to_string(state.grid.n_beta()) + "\n";
  out += "n_xi = " + std::to_string(state.grid.n_xi()) + "\n";
  out += "t = " + format_double(t) + "\n";
  out += "[phi]\n";
  for (int j = 0; j < state.phi.rows(); ++j) {
    for (int i = 0; i < state.phi.cols(); ++i) out += (i ? " " : "") + format_double(state.phi(j, i));
    out += "\n";
  }
  out += "[ghost]\n";
  for (int i = 0; i < state.ghost.size(); ++i) out += (i ? " " : "") + format_double(state.ghost(i));
  out += "\n";

  std::optional<GeometricState> geo;
  try {
    geo.emplace(geometry_from_phi(state));
  } catch (const std::exception&) {
  }
  const double nan = std::nan("");
  out += "[nodes]\n";
  out += std::string(node_columns) + "\n";
  const HalfSphereGrid& g = state.grid;
  for (int j = 0; j < g.n_beta(); ++j)
    for (int i = 0; i < g.n_xi(); ++i) {
      const double vals[] = {g.beta()(j), g.xi()(i), state.phi(j, i),
                             geo ? geo->kappa[0](j, i) : nan, geo ? geo->kappa[1](j, i) : nan,
                             geo ? geo->support(j, i) : nan, geo ? geo->area_weight(j, i) : nan};
      for (std::size_t c = 0; c < std::size(vals); ++c) out += (c ? "," : "") + format_double(vals[c]);
      out += "\n";
    }
  return out;
}

StateFile parse_state(const std::string& text, const std::string& origin)
{
  const std::vector<std::string> lines = lines_of(text);
  if (lines.empty() || lines[0].rfind("# capflow ", 0) != 0)
    throw ParseError(origin, 1, "not a capflow state file");
  std::string hash;
  std::map<std::string, std::string> meta;
  std::size_t i = 1;
  for (; i < lines.size() && lines[i] != "[phi]"; ++i) {
    const std::string line = trim(lines[i]);
    if (line.rfind("# config_hash ", 0) == 0) {
      hash = line.substr(14);
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin, static_cast<int>(i + 1), "expected 'key = value'");
    meta[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  if (i == lines.size()) throw ParseError(origin, 0, "missing [phi] section");
  auto number = [&](const std::string& key) {
    double x;
    if (!meta.count(key) || !parse_number(meta[key], x))
      throw ParseError(origin, 0, "missing or malformed '" + key + "'");
    return x;
  };
  const double theta = number("theta");
  const double t = number("t");
  const int nb = static_cast<int>(number("n_beta"));
  const int nx = static_cast<int>(number("n_xi"));
  std::optional<HalfSphereGrid> grid;
  try {
    grid.emplace(nb, nx);
  } catch (const std::exception& e) {
    throw ParseError(origin, 0, e.what());
  }

  auto read_row = [&](std::size_t line_index, double* dst) {
    if (line_index >= lines.size())
      throw ParseError(origin, static_cast<int>(line_index + 1), "file ends early (truncated?)");
    std::istringstream is(lines[line_index]);
    std::string tok;
    int count = 0;
    while (is >> tok) {
      if (count == nx)
        throw ParseError(origin, static_cast<int>(line_index + 1), "too many values");
      if (!parse_number(tok, dst[count]))
        throw ParseError(origin, static_cast<int>(line_index + 1), "malformed value '" + tok + "'");
      ++count;
    }
    if (count != nx)
      throw ParseError(origin, static_cast<int>(line_index + 1),
                       "expected " + std::to_string(nx) + " values, got " + std::to_string(count));
  };
  Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> phi(nb, nx);
  for (int j = 0; j < nb; ++j) read_row(i + 1 + j, phi.row(j).data());
  const std::size_t g = i + 1 + nb;
  if (g >= lines.size() || lines[g] != "[ghost]")
    throw ParseError(origin, static_cast<int>(g + 1), "expected [ghost] (truncated?)");
  Eigen::ArrayXd ghost(nx);
  read_row(g + 1, ghost.data());
  const std::size_t t0 = g + 2;
  if (t0 + 1 >= lines.size() || lines[t0] != "[nodes]" || lines[t0 + 1] != node_columns)
    throw ParseError(origin, static_cast<int>(t0 + 1), "expected the [nodes] table (truncated?)");
  const std::size_t rows = lines.size() - (t0 + 2);
  if (rows < static_cast<std::size_t>(nb) * nx)
    throw ParseError(origin, static_cast<int>(lines.size()),
                     "node table has " + std::to_string(rows) + " of " +
                         std::to_string(nb * nx) + " rows (truncated?)");
  return {RadialField(*grid, phi, ghost, theta), t, hash};
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace capflow
