#include "spinquench/io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace spinq::io {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

} // namespace

Ini Ini::parse_string(const std::string& text) {
  Ini ini;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      ini.data_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    ini.data_[section][key] = val;
  }
  return ini;
}

Ini Ini::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

bool Ini::has(const std::string& sec, const std::string& key) const {
  const auto s = data_.find(sec);
  return s != data_.end() && s->second.count(key) > 0;
}

std::string Ini::get(const std::string& sec, const std::string& key) const {
  const auto s = data_.find(sec);
  if (s == data_.end() || !s->second.count(key))
    throw ConfigError("missing config key [" + sec + "] " + key);
  return s->second.at(key);
}

std::string Ini::get_or(const std::string& sec, const std::string& key,
                        const std::string& fallback) const {
  return has(sec, key) ? get(sec, key) : fallback;
}

namespace {
double parse_double(const std::string& sec, const std::string& key,
                    const std::string& v) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key [" + sec + "] " + key +
                      ": not a number: '" + v + "'");
  }
}
} // namespace

double Ini::get_double(const std::string& sec, const std::string& key,
                       double fallback) const {
  if (!has(sec, key)) return fallback;
  return parse_double(sec, key, get(sec, key));
}

double Ini::require_double(const std::string& sec, const std::string& key) const {
  return parse_double(sec, key, get(sec, key));
}

long long Ini::get_int(const std::string& sec, const std::string& key,
                       long long fallback) const {
  if (!has(sec, key)) return fallback;
  const double d = parse_double(sec, key, get(sec, key));
  const long long v = static_cast<long long>(std::llround(d));
  if (d != static_cast<double>(v))
    throw ConfigError("config key [" + sec + "] " + key + ": not an integer");
  return v;
}

uint64_t Ini::get_u64(const std::string& sec, const std::string& key,
                      uint64_t fallback) const {
  if (!has(sec, key)) return fallback;
  const std::string v = get(sec, key);
  try {
    size_t pos = 0;
    const uint64_t r = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return r;
  } catch (const std::exception&) {
    throw ConfigError("config key [" + sec + "] " + key +
                      ": not an unsigned integer: '" + v + "'");
  }
}

bool Ini::get_bool(const std::string& sec, const std::string& key,
                   bool fallback) const {
  if (!has(sec, key)) return fallback;
  const std::string v = get(sec, key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key [" + sec + "] " + key +
                    ": not a boolean: '" + v + "'");
}

std::vector<double> Ini::get_double_list(const std::string& sec,
                                         const std::string& key) const {
  std::vector<double> out;
  if (!has(sec, key)) return out;
  std::string v = get(sec, key);
  for (char& ch : v)
    if (ch == ',') ch = ' ';
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(sec, key, tok));
  return out;
}

void Ini::check_known_keys(const std::string& sec,
                           const std::vector<std::string>& allowed) const {
  const auto s = data_.find(sec);
  if (s == data_.end()) return;
  std::string unknown;
  for (const auto& [key, _] : s->second) {
    bool ok = false;
    for (const auto& a : allowed)
      if (a == key) { ok = true; break; }
    if (!ok) unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty())
    throw ConfigError("unknown config keys in [" + sec + "]: " + unknown);
}

std::vector<std::string> Ini::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : data_) out.push_back(name);
  return out;
}

const std::map<std::string, std::string>* Ini::section(
    const std::string& s) const {
  const auto it = data_.find(s);
  return it == data_.end() ? nullptr : &it->second;
}

std::string Ini::to_string() const {
  std::ostringstream out;
  for (const auto& [sec, kv] : data_) {
    out << '[' << sec << "]\n";
    for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
    out << '\n';
  }
  return out.str();
}

namespace {
void require_little_endian() {
  if constexpr (std::endian::native != std::endian::little)
    throw std::runtime_error("field dumps require a little-endian host");
}
} // namespace

void write_field_dump(const std::string& stem, const field::SpinField& f,
                      double time_ms, uint64_t seed) {
  require_little_endian();
  const std::string bin_path = stem + ".bin";
  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot write " + bin_path);
  for (const auto* comp : f.components())
    bin.write(reinterpret_cast<const char*>(comp->data()),
              static_cast<std::streamsize>(comp->size() * sizeof(field::cplx)));
  bin.close();

  json side;
  side["nx"] = f.grid.nx;
  side["nz"] = f.grid.nz;
  side["dx_um"] = f.grid.dx_um;
  side["dz_um"] = f.grid.dz_um;
  side["field_names"] = {"psi_plus", "psi_zero", "psi_minus"};
  side["time_ms"] = time_ms;
  side["seed"] = seed;
  side["dtype"] = "float64_le_interleaved_complex";
  side["layout"] = "x_major_z_fastest";
  side["data_file"] = bin_path.substr(bin_path.find_last_of('/') + 1);
  write_text_file(stem + ".json", side.dump(2) + "\n");
}

field::SpinField read_field_dump(const std::string& sidecar_json_path,
                                 double* time_ms, uint64_t* seed) {
  require_little_endian();
  json side = json::parse(read_text_file(sidecar_json_path));
  const field::Grid2D grid(side.at("nx").get<int>(), side.at("nz").get<int>(),
                           side.at("dx_um").get<double>(),
                           side.at("dz_um").get<double>());
  if (time_ms) *time_ms = side.value("time_ms", 0.0);
  if (seed) *seed = side.value("seed", uint64_t(0));

  std::string dir;
  const auto slash = sidecar_json_path.find_last_of('/');
  if (slash != std::string::npos) dir = sidecar_json_path.substr(0, slash + 1);
  const std::string bin_path = dir + side.at("data_file").get<std::string>();

  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + bin_path);
  field::SpinField f(grid);
  for (auto* comp : f.components()) {
    bin.read(reinterpret_cast<char*>(comp->data()),
             static_cast<std::streamsize>(comp->size() * sizeof(field::cplx)));
    if (!bin) throw std::runtime_error("truncated field dump: " + bin_path);
  }
  return f;
}

void write_spectrum_csv(const std::string& path,
                        const std::vector<spectrum::SpectrumPoint>& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "k_um_inv,eps_hz,es2_hz2,rate_per_s,tau_ms\n";
  char buf[256];
  for (const auto& p : table) {
    const double tau_ms =
        std::isfinite(p.tau_s) ? p.tau_s * 1e3 : std::numeric_limits<double>::infinity();
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  p.k_um_inv, p.epsilon_hhz, p.es_squared_hhz2,
                  p.growth_rate_per_s, tau_ms);
    out << buf;
  }
}

void write_populations_csv(const std::string& path,
                           const std::vector<PopulationsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t_ms,N_plus,N_zero,N_minus,G0_center\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t_ms,
                  r.n_plus, r.n_zero, r.n_minus, r.g0_center);
    out << buf;
  }
}

namespace {

std::vector<std::vector<double>> read_csv_numeric(const std::string& path,
                                                  size_t min_cols) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    std::string tok;
    std::istringstream ls(line);
    bool numeric = true;
    while (std::getline(ls, tok, ',')) {
      try {
        row.push_back(std::stod(trim(tok)));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) continue; // header line
    if (row.size() < min_cols)
      throw std::runtime_error(path + ": expected at least " +
                               std::to_string(min_cols) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace

std::vector<PopulationsRow> read_populations_csv(const std::string& path) {
  std::vector<PopulationsRow> out;
  for (const auto& r : read_csv_numeric(path, 5))
    out.push_back({r[0], r[1], r[2], r[3], r[4]});
  return out;
}

std::vector<SeriesPoint> read_series_csv(const std::string& path) {
  std::vector<SeriesPoint> out;
  for (const auto& r : read_csv_numeric(path, 2))
    out.push_back({r[0], r[1], r.size() > 2 ? r[2] : 0.0});
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

} // namespace spinq::io
