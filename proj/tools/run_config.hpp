#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "capflow/epsilon_solver.hpp"
#include "capflow/geometry.hpp"

namespace capflow::cli {

/// INI config with typed, validated accessors. Missing required keys raise
/// ValidationError naming "section.key"; syntax errors raise ParseError.
class RunConfig {
 public:
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig parse(const std::string& text, const std::string& origin = "<string>");

  const std::string& text() const { return text_; }
  const std::string& origin() const { return origin_; }

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  std::optional<double> find_double(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  /// Comma-separated list of numbers.
  std::vector<double> get_list(const std::string& section, const std::string& key) const;
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               std::vector<double> fallback) const;

  MetricSpec metric() const;
  /// [solver] p or p_list, each checked against [1.01, 2.9].
  std::vector<double> p_values() const;
  GridConfig grid() const;

 private:
  std::string raw(const std::string& section, const std::string& key) const;
  boost::property_tree::ptree tree_;
  std::string text_;
  std::string origin_;
};

/// Hex SHA-256 of the config bytes.
std::string sha256_hex(const std::string& data);

}  // namespace capflow::cli
