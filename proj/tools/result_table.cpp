#include "result_table.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace chsbs_cli {

namespace {

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw std::runtime_error("bad number '" + s + "' in CSV");
  return v;
}

nlohmann::ordered_json json_num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace

bool ResultRow::operator==(const ResultRow& o) const {
  return state == o.state && quantity == o.quantity && same(parameter, o.parameter) && same(value, o.value) &&
         same(uncertainty, o.uncertainty) && same(window_lo, o.window_lo) && same(window_hi, o.window_hi) &&
         points == o.points && provenance == o.provenance && note == o.note;
}

const std::vector<std::string>& csv_header() {
  static const std::vector<std::string> h{"state",     "quantity",  "parameter", "value",      "uncertainty",
                                          "window_lo", "window_hi", "points",    "provenance", "note"};
  return h;
}

std::string to_csv(const ResultTable& t) {
  std::string out;
  for (std::size_t i = 0; i < csv_header().size(); ++i) out += (i ? "," : "") + csv_header()[i];
  out += "\r\n";
  for (const auto& r : t.rows) {
    out += quote(r.state) + ',' + quote(r.quantity) + ',' + num(r.parameter) + ',' + num(r.value) + ',' +
           num(r.uncertainty) + ',' + num(r.window_lo) + ',' + num(r.window_hi) + ',' + std::to_string(r.points) +
           ',' + quote(r.provenance) + ',' + quote(r.note) + "\r\n";
  }
  return out;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  // record splitter honouring quotes
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      rec.push_back(field);
      field.clear();
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      rec.push_back(field);
      records.push_back(rec);
      rec.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw std::runtime_error("unterminated quote in CSV");
  if (any || !rec.empty()) {
    rec.push_back(field);
    records.push_back(rec);
  }
  if (records.empty() || records[0] != csv_header()) throw std::runtime_error("CSV header mismatch");
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != csv_header().size()) throw std::runtime_error("CSV record " + std::to_string(i) + " has wrong width");
    ResultRow r;
    r.state = f[0];
    r.quantity = f[1];
    r.parameter = parse_double(f[2]);
    r.value = parse_double(f[3]);
    r.uncertainty = parse_double(f[4]);
    r.window_lo = parse_double(f[5]);
    r.window_hi = parse_double(f[6]);
    r.points = std::stoi(f[7]);
    r.provenance = f[8];
    r.note = f[9];
    rows.push_back(r);
  }
  return rows;
}

std::string to_json(const ResultTable& t, const std::string& config_text) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = t.command;
  j["energy_unit"] = t.unit;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  std::istringstream in(config_text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    // where the file went is not part of the result
    if (eq != std::string::npos && line.rfind("output.", 0) != 0) cfg[line.substr(0, eq)] = line.substr(eq + 3);
  }
  j["config"] = cfg;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json o;
    o["state"] = r.state;
    o["quantity"] = r.quantity;
    o["parameter"] = json_num(r.parameter);
    o["value"] = json_num(r.value);
    o["uncertainty"] = json_num(r.uncertainty);
    o["window_lo"] = json_num(r.window_lo);
    o["window_hi"] = json_num(r.window_hi);
    o["points"] = r.points;
    o["provenance"] = r.provenance;
    o["note"] = r.note;
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string to_plot_script(const ResultTable& t, const std::string& csv_name) {
  std::set<std::string> quantities, states;
  for (const auto& r : t.rows) {
    quantities.insert(r.quantity);
    states.insert(r.state);
  }
  std::ostringstream out;
  out << "# gnuplot: load '" << t.command << ".gp'\n";
  out << "set datafile separator ','\n";
  out << "set key outside\n";
  out << "file = '" << csv_name << "'\n";
  const bool curve = t.command == "vertex" || t.command == "scan";
  for (const auto& q : quantities) {
    out << "\nset title '" << t.command << ": " << q << "'\n";
    if (curve) {
      out << "set logscale xy\nset xlabel '" << (t.command == "scan" ? "T" : "reduced t") << "'\n";
      out << "plot";
      bool first = true;
      for (const auto& s : states) {
        out << (first ? " " : ", \\\n    ") << "file every ::1 using 3:(strcol(2) eq '" << q << "' && strcol(1) eq '"
            << s << "' ? abs($4) : 1/0) with lines title '" << s << "'";
        first = false;
      }
      out << "\nunset logscale\n";
    } else {
      out << "set style data histogram\nset style fill solid\n";
      out << "plot file every ::1 using (strcol(2) eq '" << q << "' ? $4 : 1/0):xtic(1) title '" << q << "'\n";
    }
    out << "pause -1\n";
  }
  return out.str();
}

std::vector<std::string> emit(const ResultTable& t, const std::string& format, const std::string& dir,
                              const std::string& config_text) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw std::runtime_error("output directory '" + dir + "' is not usable");
  const std::string csv = t.command + ".csv";
  std::vector<std::string> written;
  if (format == "json") {
    write_file(fs::path(dir) / (t.command + ".json"), to_json(t, config_text));
    written.push_back(t.command + ".json");
  } else {
    write_file(fs::path(dir) / csv, to_csv(t));
    written.push_back(csv);
    if (format == "plot-script") {
      write_file(fs::path(dir) / (t.command + ".gp"), to_plot_script(t, csv));
      written.push_back(t.command + ".gp");
    }
  }
  return written;
}

}  // namespace chsbs_cli
