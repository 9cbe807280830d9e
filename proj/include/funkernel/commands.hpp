#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace funkernel {

struct CliOptions {
  std::string config_path;
  std::string out;  // overrides the command's main output path
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool verbose = false;
};

// Exit codes: 0 success, 2 config error, 3 I/O error, 4 numerical/data error.
int cmd_synth(const CliOptions& opts);
int cmd_fit(const CliOptions& opts);
int cmd_cv(const CliOptions& opts);
int cmd_predict(const CliOptions& opts);
int cmd_eval(const CliOptions& opts);

}  // namespace funkernel
