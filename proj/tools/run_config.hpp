#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chsbs_cli {

// A config problem tied to one key; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& msg)
      : std::runtime_error(key.empty() ? msg : key + ": " + msg), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  // model.*  (energies in any one unit; delta_c sets the scale)
  double gtilde = 0.025;
  double delta_c = 1.0;
  double fermi_energy = 100.0;
  double fermi_momentum = 1.0;
  double q0 = 0.0;
  std::string lifetime = "constant";  // constant | fermi-liquid
  double inverse_tau = 0.05;

  // kernel.*
  std::string convention = "canonical";
  std::string weight = "physical";
  std::string fock_form = "binomial";

  // states.*  (canonical spellings after validation)
  std::vector<std::string> states{"vacuum", "fock:1", "fock:3", "fock:5", "thermal"};

  // fit.*
  double gamma_t_min = 1e-6;
  double gamma_t_max = 1e-3;
  int gamma_points = 24;
  double nu_t_min = 1e-4;
  double nu_t_max = 1e-2;
  int nu_points = 9;
  double xi_reduced_t = 1e-3;

  // quad.*
  double corr_rel_tol = 1e-9;
  double corr_max_rel_error = 1e-5;

  // scan.*  (T_c search, fractions of E_F; the scan command samples table_points of it)
  double scan_min = 1e-8;
  double scan_max = 1.0;
  int scan_points = 4000;
  int scan_table_points = 200;

  // vertex.*  (reduced temperatures for the vertex command)
  double vertex_t_min = 1e-6;
  double vertex_t_max = 1e-1;
  int vertex_points = 16;

  // output.*, units.*
  std::string output_dir = ".";
  std::string output_format = "csv";  // csv | json | plot-script
  std::string energy_unit = "delta_c";  // delta_c | input

  bool operator==(const RunConfig&) const = default;
};

// Every key the parser accepts, in emission order.
const std::vector<std::string>& config_keys();

// Assigns one key from its text form. Throws ConfigError naming the key.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// key = value lines, '#' comments. Unknown or repeated keys are errors.
RunConfig parse_config_text(const std::string& text);
// Flat {"model.gtilde": 0.025} or nested {"model": {"gtilde": 0.025}} objects.
RunConfig parse_config_json(const std::string& text);
// Picks JSON when the first non-blank character is '{'.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Lossless text form: parse_config_text(to_config_text(c)) == c.
std::string to_config_text(const RunConfig& cfg);

// Cross-field checks and state canonicalization (through the library).
void validate_config(RunConfig& cfg);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace chsbs_cli
