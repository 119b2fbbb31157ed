#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "wavespec/config.hpp"
#include "wavespec/mesh.hpp"

namespace wavespec {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitTargetMiss = 4 };

/// Number with 17 significant digits.
std::string fmt17(double v);

/// CSV file: `# provenance ...` comment, header row, data rows.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header, const std::string& provenance);
  CsvWriter& row(const std::vector<std::string>& cells);
  CsvWriter& row(const std::vector<double>& cells);
  /// Extra `# key = value` line (written before any data row).
  CsvWriter& meta(const std::string& key, double value);

 private:
  std::ofstream out_;
  std::string pending_header_;
};

/// `x,<species>,<species>x` profile file with `# L`, `# c` and `# kind` lines.
void write_profile_csv(const std::string& path, const WaveProfile& p, const std::vector<std::string>& names,
                       const std::string& provenance);
WaveProfile read_profile_csv(const std::string& path);

/// Reads numeric columns of a CSV written by CsvWriter; `# key = value` lines
/// go into meta.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, double>> meta;
};
CsvTable read_csv(const std::string& path);

/// f(0..n-1) on up to `threads` workers; results in index order.
template <class T>
std::vector<T> parallel_map(int n, int threads, const std::function<T(int)>& f) {
  std::vector<T> out(n);
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex mu;
  auto work = [&]() {
    for (int i = next++; i < n; i = next++) {
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    }
  };
  const int w = std::max(1, std::min(threads, n));
  std::vector<std::thread> pool;
  for (int t = 1; t < w; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

/// One row of the reproduce-paper summary.
struct TargetCheck {
  std::string target;
  double value = 0.0;
  std::string expected;
  bool pass = false;
};

/// Runs the task named in the config; returns the exit code. Config errors
/// return before any file is written; numerical failures leave error.json in
/// the output directory.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace wavespec
