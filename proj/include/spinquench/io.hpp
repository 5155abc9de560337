#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinquench/field.hpp"
#include "spinquench/spectrum.hpp"

namespace spinq::io {

// Configuration / validation failure; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat INI-style configuration: [section] headers, key = value lines,
// '#' or ';' comments. Keys and section names are case-sensitive.
class Ini {
 public:
  static Ini parse_file(const std::string& path);
  static Ini parse_string(const std::string& text);

  bool has(const std::string& sec, const std::string& key) const;
  std::string get(const std::string& sec, const std::string& key) const;
  std::string get_or(const std::string& sec, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& sec, const std::string& key,
                    double fallback) const;
  double require_double(const std::string& sec, const std::string& key) const;
  long long get_int(const std::string& sec, const std::string& key,
                    long long fallback) const;
  uint64_t get_u64(const std::string& sec, const std::string& key,
                   uint64_t fallback) const;
  bool get_bool(const std::string& sec, const std::string& key,
                bool fallback) const;
  std::vector<double> get_double_list(const std::string& sec,
                                      const std::string& key) const;

  // Throws ConfigError naming every key in `sec` not in `allowed`.
  void check_known_keys(const std::string& sec,
                        const std::vector<std::string>& allowed) const;
  std::vector<std::string> sections() const;
  const std::map<std::string, std::string>* section(const std::string& s) const;

  // Round-trip serialization (sorted, for manifests).
  std::string to_string() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

// Field snapshot dump: flat binary little-endian float64, complex values as
// interleaved (re, im), components concatenated in order psi_plus, psi_zero,
// psi_minus, row-major with x slow / z fast. A JSON sidecar <stem>.json
// describes the layout.
void write_field_dump(const std::string& stem, const field::SpinField& f,
                      double time_ms, uint64_t seed);
field::SpinField read_field_dump(const std::string& sidecar_json_path,
                                 double* time_ms = nullptr,
                                 uint64_t* seed = nullptr);

void write_spectrum_csv(const std::string& path,
                        const std::vector<spectrum::SpectrumPoint>& table);

struct PopulationsRow {
  double t_ms;
  double n_plus;
  double n_zero;
  double n_minus;
  double g0_center;
};
void write_populations_csv(const std::string& path,
                           const std::vector<PopulationsRow>& rows);
std::vector<PopulationsRow> read_populations_csv(const std::string& path);

// Generic G0-time-series reader for the fit subcommand: columns
// t_ms,g0[,std_error], header optional.
struct SeriesPoint {
  double t_ms;
  double g0;
  double std_error; // 0 if absent
};
std::vector<SeriesPoint> read_series_csv(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace spinq::io
