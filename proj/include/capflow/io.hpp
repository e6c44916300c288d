#pragma once

#include "capflow/flow.hpp"
#include "capflow/surface.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace capflow {

inline constexpr const char* version_string = "capflow 0.1.0";

/// Malformed input; `line` is 1-based, 0 when the problem is not tied to a line.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& origin, int line, const std::string& message);
  [[nodiscard]] int line() const { return line_; }

private:
  int line_;
};

[[nodiscard]] std::uint64_t fnv1a(const std::string& bytes);
[[nodiscard]] std::string hex64(std::uint64_t x);

/// Flat `key = value` text with `[section]` headers. `#` starts a comment.
/// Keys are stored as "section.key" (bare "key" before the first header).
class KeyValueDocument {
public:
  static KeyValueDocument parse(const std::string& text, const std::string& origin);

  [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) != 0; }
  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] long long get_int(const std::string& key, long long fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated doubles.
  [[nodiscard]] std::vector<double> get_list(const std::string& key) const;
  /// Throws on the first key not in `known`.
  void reject_unknown(const std::vector<std::string>& known) const;
  /// Keys and values in sorted order, independent of layout and comments.
  [[nodiscard]] std::string canonical() const;
  void set(const std::string& key, const std::string& value);

private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string origin_;
  std::map<std::string, Entry> entries_;

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;
};

[[nodiscard]] std::string format_double(double x);

/// Column names of the trajectory CSV, in order.
[[nodiscard]] std::vector<std::string> trajectory_columns(int n = GeometricState::n);

/// Three `#` header lines (version, config hash, schema), the column row, then one
/// row per sample.
[[nodiscard]] std::string trajectory_csv(const FlowTrajectory& trajectory,
                                         std::uint64_t config_hash);

struct TrajectoryTable {
  std::string version;
  std::string config_hash;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  [[nodiscard]] std::vector<double> column(const std::string& name) const;
};

/// Throws ParseError on a missing header, a schema mismatch or a malformed row.
[[nodiscard]] TrajectoryTable parse_trajectory_csv(const std::string& text,
                                                   const std::string& origin);

/// Columns of the `[nodes]` table of a state file.
inline constexpr const char* node_columns = "beta,xi,phi,kappa_1,kappa_2,support,area_weight";

/// State file: header lines, `key = value` metadata, `[phi]` with one line per
/// latitude row, `[ghost]` with one line, then the `[nodes]` CSV table (one row per
/// node, pole to equator; geometry columns are nan when it cannot be evaluated).
/// Only `[phi]` and `[ghost]` are read back.
[[nodiscard]] std::string serialize_state(const RadialField& state, double t,
                                          std::uint64_t config_hash);

struct StateFile {
  RadialField state;
  double t = 0.0;
  std::string config_hash;
};

[[nodiscard]] StateFile parse_state(const std::string& text, const std::string& origin);

[[nodiscard]] std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

} // namespace capflow
