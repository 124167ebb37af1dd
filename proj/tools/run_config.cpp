#include "run_config.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "chsbs/chsbs.h"
#include "json.hpp"

namespace chsbs_cli {

namespace {

using Member = std::variant<double RunConfig::*, int RunConfig::*, std::string RunConfig::*,
                            std::vector<std::string> RunConfig::*>;

struct Field {
  const char* key;
  Member member;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      {"model.gtilde", &RunConfig::gtilde},
      {"model.delta_c", &RunConfig::delta_c},
      {"model.fermi_energy", &RunConfig::fermi_energy},
      {"model.fermi_momentum", &RunConfig::fermi_momentum},
      {"model.q0", &RunConfig::q0},
      {"model.lifetime", &RunConfig::lifetime},
      {"model.inverse_tau", &RunConfig::inverse_tau},
      {"kernel.convention", &RunConfig::convention},
      {"kernel.weight", &RunConfig::weight},
      {"kernel.fock_form", &RunConfig::fock_form},
      {"states.list", &RunConfig::states},
      {"fit.gamma_t_min", &RunConfig::gamma_t_min},
      {"fit.gamma_t_max", &RunConfig::gamma_t_max},
      {"fit.gamma_points", &RunConfig::gamma_points},
      {"fit.nu_t_min", &RunConfig::nu_t_min},
      {"fit.nu_t_max", &RunConfig::nu_t_max},
      {"fit.nu_points", &RunConfig::nu_points},
      {"fit.xi_reduced_t", &RunConfig::xi_reduced_t},
      {"quad.correlation_rel_tol", &RunConfig::corr_rel_tol},
      {"quad.correlation_max_rel_error", &RunConfig::corr_max_rel_error},
      {"scan.t_min", &RunConfig::scan_min},
      {"scan.t_max", &RunConfig::scan_max},
      {"scan.points", &RunConfig::scan_points},
      {"scan.table_points", &RunConfig::scan_table_points},
      {"vertex.t_min", &RunConfig::vertex_t_min},
      {"vertex.t_max", &RunConfig::vertex_t_max},
      {"vertex.points", &RunConfig::vertex_points},
      {"output.dir", &RunConfig::output_dir},
      {"output.format", &RunConfig::output_format},
      {"units.energy", &RunConfig::energy_unit},
  };
  return f;
}

const Field& field(const std::string& key) {
  for (const auto& f : fields())
    if (key == f.key) return f;
  throw ConfigError(key, "unknown key");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw ConfigError(key, "'" + text + "' is not a valid " + (std::is_same_v<T, int> ? "integer" : "number"));
  if constexpr (std::is_same_v<T, double>)
    if (!std::isfinite(v)) throw ConfigError(key, "value must be finite");
  return v;
}

// Splits at top-level commas; mixtures keep their braces.
std::vector<std::string> split_states(const std::string& key, const std::string& text) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : text) {
    if (c == '{') ++depth;
    if (c == '}') --depth;
    if (depth < 0) throw ConfigError(key, "unbalanced '}'");
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (depth != 0) throw ConfigError(key, "unbalanced '{'");
  out.push_back(trim(cur));
  for (const auto& s : out)
    if (s.empty()) throw ConfigError(key, "empty state in list");
  return out;
}

void require(bool ok, const char* key, const std::string& msg) {
  if (!ok) throw ConfigError(key, msg);
}

void require_choice(const std::string& value, const char* key, std::initializer_list<const char*> choices) {
  std::string list;
  for (const char* c : choices) {
    if (value == c) return;
    list += list.empty() ? c : std::string(", ") + c;
  }
  throw ConfigError(key, "'" + value + "' is not one of " + list);
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.emplace_back(f.key);
    return out;
  }();
  return k;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  std::visit(
      [&](auto member) {
        using M = std::remove_reference_t<decltype(cfg.*member)>;
        if constexpr (std::is_same_v<M, double>) cfg.*member = parse_number<double>(key, value);
        else if constexpr (std::is_same_v<M, int>) cfg.*member = parse_number<int>(key, value);
        else if constexpr (std::is_same_v<M, std::string>) cfg.*member = value;
        else cfg.*member = split_states(key, value);
      },
      field(key).member);
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    if (!seen.insert(key).second) throw ConfigError(key, "repeated key");
    set_config_value(cfg, key, line.substr(eq + 1));
  }
  return cfg;
}

RunConfig parse_config_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("", "JSON config must be an object");
  RunConfig cfg;
  std::set<std::string> seen;
  std::function<void(const nlohmann::json&, const std::string&)> walk = [&](const nlohmann::json& node,
                                                                            const std::string& prefix) {
    for (const auto& [k, v] : node.items()) {
      std::string key = prefix.empty() ? k : prefix + "." + k;
      if (key == "states" && v.is_array()) key = "states.list";  // shorthand
      if (v.is_object()) {
        walk(v, key);
        continue;
      }
      if (!seen.insert(key).second) throw ConfigError(key, "repeated key");
      std::string value;
      if (v.is_string()) {
        value = v.get<std::string>();
      } else if (v.is_number()) {
        value = v.is_number_float() ? format_double(v.get<double>()) : v.dump();
      } else if (v.is_array()) {
        for (const auto& item : v) {
          if (!item.is_string()) throw ConfigError(key, "array entries must be strings");
          value += value.empty() ? item.get<std::string>() : ", " + item.get<std::string>();
        }
      } else {
        throw ConfigError(key, "unsupported JSON value " + v.dump());
      }
      set_config_value(cfg, key, value);
    }
  };
  walk(j, "");
  return cfg;
}

RunConfig parse_config(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_config_json(text);
  return parse_config_text(text);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_config_text(const RunConfig& cfg) {
  std::ostringstream out;
  for (const auto& f : fields()) {
    out << f.key << " = ";
    std::visit(
        [&](auto member) {
          using M = std::remove_cvref_t<decltype(cfg.*member)>;
          if constexpr (std::is_same_v<M, double>) out << format_double(cfg.*member);
          else if constexpr (std::is_same_v<M, int>) out << cfg.*member;
          else if constexpr (std::is_same_v<M, std::string>) out << cfg.*member;
          else {
            const auto& v = cfg.*member;
            for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i];
          }
        },
        f.member);
    out << '\n';
  }
  return out.str();
}

void validate_config(RunConfig& cfg) {
  require(cfg.gtilde > 0.0, "model.gtilde", "must be positive");
  require(cfg.delta_c > 0.0, "model.delta_c", "must be positive");
  require(cfg.fermi_energy > 0.0, "model.fermi_energy", "must be positive");
  require(cfg.fermi_momentum > 0.0, "model.fermi_momentum", "must be positive");
  require(cfg.q0 >= 0.0 && cfg.q0 < 0.1 * cfg.fermi_momentum, "model.q0", "must satisfy 0 <= q0 < 0.1 k_F");
  require_choice(cfg.lifetime, "model.lifetime", {"constant", "fermi-liquid"});
  if (cfg.lifetime == "constant") require(cfg.inverse_tau > 0.0, "model.inverse_tau", "must be positive");
  require_choice(cfg.convention, "kernel.convention", {"canonical", "eq-bs-u-freq", "subsec-tc"});
  require_choice(cfg.weight, "kernel.weight", {"physical", "simplified"});
  require_choice(cfg.fock_form, "kernel.fock_form", {"binomial", "leading-pole"});
  require(!cfg.states.empty(), "states.list", "needs at least one state");
  std::set<std::string> unique;
  for (auto& s : cfg.states) {
    char buf[512];
    if (chsbs_canonical_state(s.c_str(), buf, sizeof buf) != CHSBS_OK)
      throw ConfigError("states.list", chsbs_last_error());
    s = buf;
    require(unique.insert(s).second, "states.list", "state '" + s + "' listed twice");
  }
  require(cfg.gamma_t_min > 0.0 && cfg.gamma_t_max > cfg.gamma_t_min, "fit.gamma_t_max",
          "window needs 0 < t_min < t_max");
  require(cfg.gamma_points >= 3, "fit.gamma_points", "needs at least 3 points");
  require(cfg.nu_t_min > 0.0 && cfg.nu_t_max > cfg.nu_t_min, "fit.nu_t_max", "window needs 0 < t_min < t_max");
  require(cfg.nu_points >= 3, "fit.nu_points", "needs at least 3 points");
  require(cfg.xi_reduced_t > 0.0, "fit.xi_reduced_t", "must be positive");
  require(cfg.corr_rel_tol > 0.0, "quad.correlation_rel_tol", "must be positive");
  require(cfg.corr_max_rel_error > 0.0, "quad.correlation_max_rel_error", "must be positive");
  require(cfg.scan_min > 0.0 && cfg.scan_max > cfg.scan_min && cfg.scan_max <= 1.0, "scan.t_max",
          "scan needs 0 < t_min < t_max <= 1 (fractions of E_F)");
  require(cfg.scan_points >= 3, "scan.points", "needs at least 3 points");
  require(cfg.scan_table_points >= 2, "scan.table_points", "needs at least 2 points");
  require(cfg.vertex_t_min > 0.0 && cfg.vertex_t_max > cfg.vertex_t_min, "vertex.t_max",
          "window needs 0 < t_min < t_max");
  require(cfg.vertex_points >= 1, "vertex.points", "needs at least 1 point");
  require(!cfg.output_dir.empty(), "output.dir", "must not be empty");
  require_choice(cfg.output_format, "output.format", {"csv", "json", "plot-script"});
  require_choice(cfg.energy_unit, "units.energy", {"delta_c", "input"});
}

}  // namespace chsbs_cli
