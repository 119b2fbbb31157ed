#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wavespec/config.hpp"
#include "wavespec/pipeline.hpp"

namespace {

struct Args {
  std::string config;
  std::vector<std::string> sets;
  std::string output;
  int threads = 0;
};

void add_common(CLI::App* sub, Args& a) {
  sub->add_option("-c,--config", a.config, "config file (key = value)");
  sub->add_option("-s,--set", a.sets, "override, key=value (repeatable)");
  sub->add_option("-o,--output", a.output, "output directory");
  sub->add_option("-j,--threads", a.threads, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavespec: existence, spectra and stability of travelling waves"};
  app.require_subcommand(1);
  app.set_version_flag("--version", WAVESPEC_VERSION);
  Args a;

  auto* run = app.add_subcommand("run", "run the task named in a config file");
  run->add_option("config", a.config, "config file")->required();
  run->add_option("-s,--set", a.sets, "override, key=value (repeatable)");
  run->add_option("-o,--output", a.output, "output directory");
  run->add_option("-j,--threads", a.threads, "worker threads");

  std::vector<std::pair<CLI::App*, std::string>> tasks;
  for (const auto& t : wavespec::RunConfig::tasks()) {
    auto* sub = app.add_subcommand(t, "task '" + t + "'");
    add_common(sub, a);
    tasks.emplace_back(sub, t);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : wavespec::kExitConfig;
  }

  wavespec::RunConfig cfg;
  try {
    if (!a.config.empty()) cfg = wavespec::RunConfig::load(a.config);
    for (const auto& [sub, name] : tasks)
      if (sub->parsed()) cfg.set("task", name);
    for (const auto& s : a.sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw wavespec::ConfigError("--set expects key=value, got '" + s + "'");
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!a.output.empty()) cfg.set("output", a.output);
    if (a.threads > 0) cfg.set("threads", std::to_string(a.threads));
  } catch (const wavespec::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return wavespec::kExitConfig;
  }
  return wavespec::run(cfg, std::cerr);
}
