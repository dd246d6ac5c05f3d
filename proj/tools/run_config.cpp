#include "run_config.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <openssl/evp.h>

#include "capflow/error.hpp"
#include "capflow/radial.hpp"

namespace capflow::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

std::string where(const std::string& section, const std::string& key) {
  return section + "." + key;
}

double to_double(const std::string& text, const std::string& section, const std::string& key) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError("config key " + where(section, key) + ": '" + text + "' is not a number");
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

RunConfig RunConfig::parse(const std::string& text, const std::string& origin) {
  RunConfig c;
  c.text_ = text;
  c.origin_ = origin;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, c.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(origin + ":" + std::to_string(e.line()) + ": " + e.message(),
                     static_cast<int>(e.line()));
  }
  for (const auto& [name, child] : c.tree_) {
    if (child.empty() && !child.data().empty()) {
      throw ParseError(origin + ": key '" + name + "' appears outside any section", 0);
    }
  }
  return c;
}

bool RunConfig::has_section(const std::string& section) const {
  return tree_.find(section) != tree_.not_found();
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
  const auto s = tree_.find(section);
  if (s == tree_.not_found()) return false;
  return s->second.find(key) != s->second.not_found();
}

std::string RunConfig::raw(const std::string& section, const std::string& key) const {
  const auto s = tree_.find(section);
  if (s == tree_.not_found()) {
    throw ValidationError("config is missing section [" + section + "] (needed for " +
                          where(section, key) + ")");
  }
  const auto k = s->second.find(key);
  if (k == s->second.not_found()) throw ValidationError("config is missing key " + where(section, key));
  std::string v = k->second.data();
  // Inline comments after ';' or '#'.
  const auto cut = v.find_first_of(";#");
  if (cut != std::string::npos) v = v.substr(0, cut);
  return trim(v);
}

std::string RunConfig::get_string(const std::string& section, const std::string& key) const {
  return raw(section, key);
}

std::string RunConfig::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  return has(section, key) ? raw(section, key) : fallback;
}

double RunConfig::get_double(const std::string& section, const std::string& key) const {
  return to_double(raw(section, key), section, key);
}

double RunConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

std::optional<double> RunConfig::find_double(const std::string& section,
                                             const std::string& key) const {
  if (!has(section, key)) return std::nullopt;
  return get_double(section, key);
}

int RunConfig::get_int(const std::string& section, const std::string& key, int fallback) const {
  if (!has(section, key)) return fallback;
  const double v = get_double(section, key);
  if (v != std::floor(v)) throw ValidationError("config key " + where(section, key) + " must be an integer");
  return static_cast<int>(v);
}

bool RunConfig::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  std::string v = raw(section, key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ValidationError("config key " + where(section, key) + ": '" + v + "' is not a boolean");
}

std::vector<double> RunConfig::get_list(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(raw(section, key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ValidationError("config key " + where(section, key) + " has an empty list item");
    out.push_back(to_double(item, section, key));
  }
  if (out.empty()) throw ValidationError("config key " + where(section, key) + " is an empty list");
  return out;
}

std::vector<double> RunConfig::get_list(const std::string& section, const std::string& key,
                                        std::vector<double> fallback) const {
  return has(section, key) ? get_list(section, key) : fallback;
}

MetricSpec RunConfig::metric() const {
  const std::string kind = get_string("metric", "kind");
  if (kind == "flat") return MetricSpec::flat(get_double("metric", "r_min", get_double("metric", "r0", 1.0)));
  if (kind == "schwarzschild") {
    const double m = has("metric", "mass") ? get_double("metric", "mass") : get_double("metric", "m");
    if (!(m > 0.0)) throw ValidationError("metric.mass must be positive");
    return MetricSpec::schwarzschild(m);
  }
  if (kind == "conformal" || kind == "conformal_polynomial") {
    return MetricSpec::conformal_polynomial(get_list("metric", "coefficients"),
                                            get_double("metric", "r_min"));
  }
  if (kind == "grid") {
    throw ValidationError("metric.kind = grid needs a programmatic gamma_ij; use the library API");
  }
  throw ValidationError("metric.kind '" + kind + "' is not one of flat, schwarzschild, conformal");
}

std::vector<double> RunConfig::p_values() const {
  std::vector<double> ps;
  if (has("solver", "p_list")) {
    ps = get_list("solver", "p_list");
  } else if (has("solver", "p")) {
    ps = {get_double("solver", "p")};
  } else {
    throw ValidationError("config needs solver.p or solver.p_list");
  }
  for (double p : ps) {
    try {
      require_supported_exponent(p);
    } catch (const ParameterError& e) {
      throw ValidationError(std::string("solver.p: ") + e.what());
    }
  }
  return ps;
}

GridConfig RunConfig::grid() const {
  GridConfig g;
  g.spacing = get_double("solver", "spacing", g.spacing);
  g.inner_radius = get_double("solver", "inner_radius", g.inner_radius);
  g.outer_radius = get_double("solver", "outer_radius", g.outer_radius);
  g.tol_picard = get_double("solver", "tol_picard", g.tol_picard);
  g.tol_lin = get_double("solver", "tol_lin", g.tol_lin);
  g.max_sweeps = get_int("solver", "max_sweeps", g.max_sweeps);
  g.pin_fraction = get_double("solver", "pin_fraction", g.pin_fraction);
  const std::string sym = get_string("solver", "symmetry", "octant");
  if (sym == "octant") {
    g.symmetry = Symmetry::Octant;
  } else if (sym == "none") {
    g.symmetry = Symmetry::None;
  } else {
    throw ValidationError("solver.symmetry must be octant or none");
  }
  if (!(g.tol_picard > 0.0 && g.tol_lin > 0.0)) throw ValidationError("solver tolerances must be positive");
  if (!(g.spacing > 0.0)) throw ValidationError("solver.spacing must be positive");
  if (!(g.outer_radius > g.inner_radius)) throw ValidationError("solver.outer_radius must exceed inner_radius");
  return g;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

}  // namespace capflow::cli
