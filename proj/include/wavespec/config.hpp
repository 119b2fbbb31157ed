#pragma once

#include <map>
#include <string>
#include <vector>

#include "wavespec/errors.hpp"
#include "wavespec/model.hpp"

namespace wavespec {

/// Malformed or out-of-range configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

/// Flat `key = value` configuration. Keys are dotted (`bloch.L`); a line
/// `[bloch]` prefixes the keys that follow it. `#` starts a comment. Every key
/// must be known; `model.<name>` entries are passed to the model factory.
class RunConfig {
 public:
  RunConfig();

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  /// Sets one key, rejecting unknown keys and malformed numbers.
  void set(const std::string& key, const std::string& value);
  /// Positive tolerances, ordered brackets, a known task.
  void validate() const;

  std::string task() const { return text("task"); }
  std::string output() const { return text("output"); }
  /// `threads`, overridden by WAVESPEC_THREADS.
  int threads() const;

  ModelSpec model() const;
  const Params& model_params() const { return model_params_; }

  double real(const std::string& key) const;
  int integer(const std::string& key) const;
  std::string text(const std::string& key) const;
  bool flag(const std::string& key) const;

  /// Sorted `key = value` lines including defaults.
  std::string canonical() const;
  /// FNV-1a hash of canonical(), 16 hex digits.
  std::string hash() const;

  static const std::vector<std::string>& tasks();

 private:
  std::map<std::string, std::string> values_;
  Params model_params_;
};

}  // namespace wavespec
