#include "wavespec/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wavespec {

namespace {

enum class Type { real, integer, text, flag };
enum class Rule { any, positive, nonneg };

struct Key {
  const char* name;
  Type type;
  const char* def;
  Rule rule = Rule::any;
};

// clang-format off
const std::vector<Key>& schema() {
  static const std::vector<Key> keys = {
    {"task", Type::text, ""},
    {"output", Type::text, "out"},
    {"threads", Type::integer, "1", Rule::positive},
    {"model.name", Type::text, "gsk"},

    {"dispersion.state", Type::text, "plus"},
    {"dispersion.c", Type::real, "0"},
    {"dispersion.kappa_max", Type::real, "15", Rule::positive},
    {"dispersion.kappa_points", Type::integer, "1501", Rule::positive},
    {"dispersion.jump_tol", Type::real, "0.1", Rule::positive},

    {"onset.lo", Type::real, "0.43"},
    {"onset.hi", Type::real, "0.63"},
    {"onset.tol", Type::real, "1e-6", Rule::positive},

    {"wavetrain.L", Type::real, "6", Rule::positive},
    {"wavetrain.L_min", Type::real, "3", Rule::positive},
    {"wavetrain.L_max", Type::real, "80", Rule::positive},
    {"wavetrain.defect_tol", Type::real, "1e-6", Rule::positive},
    {"wavetrain.hmax", Type::real, "0.5", Rule::positive},
    {"wavetrain.max_points", Type::integer, "2000", Rule::positive},
    {"wavetrain.profiles", Type::flag, "true"},

    {"bloch.L", Type::real, "5.9", Rule::positive},
    {"bloch.gamma_points", Type::integer, "64", Rule::positive},
    {"bloch.gamma_max", Type::real, "3.141592653589793", Rule::positive},
    {"bloch.n_modes", Type::integer, "40", Rule::positive},
    {"bloch.M_grid", Type::integer, "0", Rule::nonneg},
    {"bloch.jump_tol", Type::real, "0.1", Rule::positive},

    {"sideband.L_lo", Type::real, "5.8", Rule::positive},
    {"sideband.L_hi", Type::real, "6.2", Rule::positive},
    {"sideband.tol", Type::real, "1e-3", Rule::positive},

    {"evans.a", Type::real, "0.25", Rule::positive},
    {"evans.X", Type::real, "30", Rule::positive},
    {"evans.nodes", Type::integer, "1201", Rule::positive},
    {"evans.re_min", Type::real, "-0.2"},
    {"evans.re_max", Type::real, "0.6"},
    {"evans.im_min", Type::real, "-0.5"},
    {"evans.im_max", Type::real, "0.5"},
    {"evans.grid", Type::integer, "21", Rule::positive},
    {"evans.center_re", Type::real, "0.1"},
    {"evans.center_im", Type::real, "0"},
    {"evans.radius", Type::real, "0.2", Rule::positive},
    {"evans.contour_points", Type::integer, "64", Rule::positive},
    {"evans.step", Type::real, "0.01", Rule::positive},

    {"simulate.base", Type::text, "wavetrain"},
    {"simulate.profile", Type::text, ""},
    {"simulate.mode", Type::text, ""},
    {"simulate.state", Type::text, "plus"},
    {"simulate.kappa", Type::real, "0", Rule::nonneg},
    {"simulate.periods", Type::integer, "10", Rule::positive},
    {"simulate.j", Type::integer, "1", Rule::nonneg},
    {"simulate.points_per_period", Type::integer, "512", Rule::positive},
    {"simulate.T", Type::real, "500", Rule::positive},
    {"simulate.dt", Type::real, "0.05", Rule::positive},
    {"simulate.epsilon", Type::real, "1e-4", Rule::positive},
    {"simulate.record_every", Type::real, "0.5", Rule::positive},
    {"simulate.scheme", Type::text, "tr-bdf2"},
    {"simulate.snapshots", Type::integer, "0", Rule::nonneg},
    {"simulate.stop_after_window", Type::flag, "true"},
  };
  return keys;
}
// clang-format on

const Key* find_key(const std::string& name) {
  for (const auto& k : schema())
    if (name == k.name) return &k;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) return s.substr(1, s.size() - 2);
  return s;
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end && *end == '\0' && std::isfinite(out);
}

bool parse_int(const std::string& s, long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtol(s.c_str(), &end, 10);
  return end && *end == '\0';
}

bool parse_flag(const std::string& s, bool& out) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return out = true, true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return out = false, true;
  return false;
}

}  // namespace

RunConfig::RunConfig() {
  for (const auto& k : schema()) values_[k.name] = k.def;
}

const std::vector<std::string>& RunConfig::tasks() {
  static const std::vector<std::string> t = {"equilibria", "dispersion", "turing-hopf", "wavetrain",     "bloch",
                                             "sideband",   "evans",      "simulate",    "reproduce-paper"};
  return t;
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty()) key = section + "." + key;
    try {
      cfg.set(key, unquote(trim(line.substr(eq + 1))));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key.rfind("model.", 0) == 0 && key != "model.name") {
    double v;
    if (!parse_real(value, v)) throw ConfigError("'" + key + "': not a number: '" + value + "'");
    model_params_[key.substr(6)] = v;
    return;
  }
  const Key* k = find_key(key);
  if (!k) throw ConfigError("unknown key '" + key + "'");
  double r;
  long i;
  bool b;
  switch (k->type) {
    case Type::real:
      if (!parse_real(value, r)) throw ConfigError("'" + key + "': not a number: '" + value + "'");
      break;
    case Type::integer:
      if (!parse_int(value, i)) throw ConfigError("'" + key + "': not an integer: '" + value + "'");
      break;
    case Type::flag:
      if (!parse_flag(value, b)) throw ConfigError("'" + key + "': not a boolean: '" + value + "'");
      break;
    case Type::text:
      break;
  }
  values_[key] = value;
}

void RunConfig::validate() const {
  const auto& t = tasks();
  if (task().empty()) throw ConfigError("no task given");
  if (std::find(t.begin(), t.end(), task()) == t.end()) throw ConfigError("unknown task '" + task() + "'");
  if (output().empty()) throw ConfigError("empty output directory");
  for (const auto& k : schema()) {
    if (k.rule == Rule::any) continue;
    const double v = k.type == Type::integer ? integer(k.name) : real(k.name);
    if (k.rule == Rule::positive && !(v > 0.0)) throw ConfigError(std::string("'") + k.name + "' must be positive");
    if (k.rule == Rule::nonneg && !(v >= 0.0)) throw ConfigError(std::string("'") + k.name + "' must be >= 0");
  }
  auto ordered = [&](const char* lo, const char* hi) {
    if (!(real(lo) < real(hi))) throw ConfigError(std::string("bracket ") + lo + " < " + hi + " violated");
  };
  ordered("onset.lo", "onset.hi");
  ordered("wavetrain.L_min", "wavetrain.L_max");
  ordered("sideband.L_lo", "sideband.L_hi");
  ordered("evans.re_min", "evans.re_max");
  ordered("evans.im_min", "evans.im_max");
  const auto one_of = [&](const char* key, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
      if (text(key) == a) return;
    throw ConfigError(std::string("'") + key + "': unsupported value '" + text(key) + "'");
  };
  one_of("dispersion.state", {"plus", "minus", "desert"});
  one_of("simulate.state", {"plus", "minus", "desert"});
  one_of("simulate.base", {"wavetrain", "homogeneous"});
  one_of("simulate.scheme", {"tr-bdf2", "implicit-euler"});
  if (!(real("simulate.record_every") >= real("simulate.dt"))) {
    throw ConfigError("simulate.record_every must be >= simulate.dt");
  }
  try {
    (void)model();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

int RunConfig::threads() const {
  if (const char* env = std::getenv("WAVESPEC_THREADS")) {
    long v;
    if (parse_int(env, v) && v > 0) return static_cast<int>(v);
  }
  return integer("threads");
}

ModelSpec RunConfig::model() const { return make_model(text("model.name"), model_params_); }

double RunConfig::real(const std::string& key) const {
  double v;
  if (!parse_real(text(key), v)) throw ConfigError("'" + key + "' is not a number");
  return v;
}

int RunConfig::integer(const std::string& key) const {
  long v;
  if (!parse_int(text(key), v)) throw ConfigError("'" + key + "' is not an integer");
  return static_cast<int>(v);
}

std::string RunConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

bool RunConfig::flag(const std::string& key) const {
  bool b;
  if (!parse_flag(text(key), b)) throw ConfigError("'" + key + "' is not a boolean");
  return b;
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> all = values_;
  all.erase("output");
  all.erase("threads");
  for (const auto& [k, v] : model_params_) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    all["model." + k] = buf;
  }
  std::string out;
  for (const auto& [k, v] : all) out += k + " = " + v + "\n";
  return out;
}

std::string RunConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace wavespec
