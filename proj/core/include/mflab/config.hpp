#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mflab/nbody.hpp"

namespace mflab {

/// Configuration problem; `field()` names the offending key (dotted path).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

namespace config {

/// One value in the key-value experiment file: scalar, array of scalars,
/// or a one-level inline table.
struct Value {
  using Scalar = std::variant<std::int64_t, double, bool, std::string>;
  std::variant<Scalar, std::vector<Scalar>, std::map<std::string, Scalar>> data;

  bool is_scalar() const { return data.index() == 0; }
  bool is_array() const { return data.index() == 1; }
  bool is_table() const { return data.index() == 2; }
};

/// Parsed file: flat `key = value` lines, `#` comments, quoted strings,
/// numeric/boolean scalars, `[a, b, c]` arrays and `{k = v, ...}` tables.
class File {
 public:
  static File parse(const std::string& text);
  static File load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const Value& at(const std::string& key) const;
  const std::map<std::string, Value>& values() const { return values_; }
  const std::string& raw_text() const { return raw_; }

 private:
  std::map<std::string, Value> values_;
  std::string raw_;
};

}  // namespace config

/// Declarative experiment description. Every downstream precondition is
/// validated up front, before any computation starts.
struct ExperimentConfig {
  int dim = 3;
  std::vector<double> j_upper;           // strict upper triangle; default rotation block
  std::string density_type = "uniform_ball";
  double density_radius = 1.0;

  std::vector<std::size_t> n_ladder;     // one entry = single run
  std::vector<std::uint64_t> seeds{1};
  double t_end = 0.5;
  std::size_t samples = 32;

  nbody::StepControls controls;

  double counting_eps3 = 0.0;            // 0 = auto N^{-1/3}
  double truncation_eps1 = 0.0;          // 0 = auto N^{-(d+2)/(d^2-2)}
  bool sobolev_enabled = true;
  double sobolev_s = -2.0;
  double sobolev_cutoff = 200.0;
  int sobolev_radial = 256;
  std::vector<std::size_t> evolve_ladder;  // converge: which N get time evolution

  std::string out_dir = "runs/out";
  unsigned threads = 0;

  std::string source_text;               // raw config bytes (hash input)

  static ExperimentConfig from_file(const std::filesystem::path& path);
  static ExperimentConfig from_text(const std::string& text);

  /// Effective settings with defaults filled in, echoed into the manifest.
  nlohmann::ordered_json echo() const;

  /// Throws ConfigError naming the field when any invariant fails.
  void validate() const;

  std::size_t single_n() const { return n_ladder.front(); }
  bool is_ladder() const { return n_ladder.size() > 1; }
};

}  // namespace mflab
