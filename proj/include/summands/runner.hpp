#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "summands/decompose.hpp"
#include "summands/taskfile.hpp"

namespace summands {

struct RunOptions {
  // Defaults for tasks that do not set their own.
  std::optional<uint64_t> seed;
  std::optional<int> attempts;
  std::optional<bool> autoextend;
  // Largest extension degree over the base field autoextension may use.
  std::optional<unsigned> max_extension;
  int degree_window = 2;
  bool emit_basis = false;
  bool parallel = false;
  unsigned threads = 1;
  bool verbose = false;
  // Record wall-clock time in the JSON records.
  bool timing = true;
};

struct RunReport {
  int exit_code = 0;
  nlohmann::json records = nlohmann::json::array();
};

// 0 success, 1 syntax, 2 semantic or grading, 3 unsupported extension,
// 4 resource limit, 5 internal consistency check.
int exit_code_for(ErrorCode code);

// Runs the tasks in order, printing the human summary to `out` and
// diagnostics to `err`. Stops at the first failing task.
RunReport run_tasks(const TaskFile& file, const RunOptions& options, std::ostream& out, std::ostream& err);

// One-line summary such as O(0)^1 + O(-1)^7 + O(-2)^1.
std::string summary_line(const Decomposition& D);

}  // namespace summands
