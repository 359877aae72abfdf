#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "susylab/ensemble.hpp"
#include "susylab/errors.hpp"

namespace susylab {

// Parse or validation error; the message names the key and its source line.
struct ConfigError : InvalidInput {
  using InvalidInput::InvalidInput;
};

enum class ValueKind { integer, unsigned_integer, real, boolean, text, real_list, int_list, complex_list };

struct KeySpec {
  std::string key;  // dotted path
  ValueKind kind;
  std::string default_value;  // YAML text; empty = required / no default
  std::string help;
};
const std::vector<KeySpec>& config_schema();

// A real given either as a decimal literal or as a rational "p/q". The
// original spelling is kept so the resolved config round-trips exactly.
struct Real {
  double value = 0.0;
  std::string text;
};
Real parse_real(const std::string& text);
// Shortest decimal that reads back to the same double.
std::string shortest_repr(double v);

class ExperimentConfig {
 public:
  // overrides: "key=value" with value in YAML flow syntax
  static ExperimentConfig from_file(const std::string& path, const std::vector<std::string>& overrides = {});
  static ExperimentConfig from_string(const std::string& text, const std::vector<std::string>& overrides = {},
                                      const std::string& source = "<config>");

  void set(const std::string& key, const std::string& yaml_value, const std::string& origin = "--set");

  const std::string& op() const;
  std::uint64_t seed() const;
  std::string output_dir() const;

  std::int64_t integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  double real(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> real_list(const std::string& key) const;
  std::vector<std::int64_t> int_list(const std::string& key) const;
  std::vector<std::complex<double>> complex_list(const std::string& key) const;

  EnsembleSpec ensemble() const;

  // Full config after defaults, canonical key order.
  std::string resolved() const;
  // FNV-1a of the resolved config without output_dir.
  std::uint64_t hash() const;
  std::string hash_hex() const;

 private:
  struct Entry {
    ValueKind kind;
    std::string canonical;  // YAML text
    std::vector<Real> reals;
    std::vector<std::int64_t> ints;
    std::uint64_t u = 0;
    bool b = false;
    std::string s;
  };
  std::map<std::string, Entry> values_;
  bool has_ensemble_ = false;
  const Entry& entry(const std::string& key, ValueKind kind) const;
  std::string render(bool with_output_dir) const;
  void finalize();
};

}  // namespace susylab
