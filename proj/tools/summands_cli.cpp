#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "summands/runner.hpp"

using namespace summands;

namespace {

bool read_input(const std::string& path, std::string& text) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) return false;
    ss << in.rdbuf();
  }
  text = ss.str();
  return true;
}

unsigned thread_cap() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SUMMANDS_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return std::min(hw, unsigned(v));
  }
  return hw;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct-sum decomposition of modules over graded and local rings"};
  std::string input;
  std::string json_out;
  uint64_t seed = 0;
  int attempts = 0;
  bool autoextend = false, no_autoextend = false, implicit_mult = false, no_timing = false;
  int window = 2;
  unsigned max_extension = 0;
  RunOptions opt;

  app.add_option("input", input, "Task file, or - for standard input")->required();
  auto* seed_opt = app.add_option("--seed", seed, "Seed for every randomized step");
  auto* att_opt = app.add_option("--attempts", attempts, "Random endomorphisms tried per corner")->check(CLI::PositiveNumber);
  app.add_flag("--autoextend", autoextend, "Extend finite fields until eigenvalues split");
  app.add_flag("--no-autoextend", no_autoextend, "Never extend the field");
  app.add_option("--json-out", json_out, "Write one JSON record per task to this file");
  app.add_flag("--emit-basis", opt.emit_basis, "Print change-of-basis matrices for decompositions");
  app.add_flag("--parallel", opt.parallel, "Allow concurrent decomposition branches");
  app.add_flag("--verbose", opt.verbose, "Timing and progress on standard error");
  app.add_option("--degree-window", window, "Width of Hilbert windows")->check(CLI::Range(0, 1000));
  auto* ext_opt = app.add_option("--max-extension", max_extension, "Largest extension degree for autoextension")
                      ->check(CLI::PositiveNumber);
  app.add_flag("--implicit-mult", implicit_mult, "Accept juxtaposition such as x^2y as multiplication");
  app.add_flag("--no-timing", no_timing, "Leave wall-clock times out of the JSON records");
  app.get_option("--autoextend")->excludes("--no-autoextend");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*seed_opt) opt.seed = seed;
  if (*att_opt) opt.attempts = attempts;
  if (autoextend) opt.autoextend = true;
  if (no_autoextend) opt.autoextend = false;
  if (*ext_opt) opt.max_extension = max_extension;
  opt.degree_window = window;
  opt.timing = !no_timing;
  opt.threads = opt.parallel ? thread_cap() : 1;

  std::string text;
  if (!read_input(input, text)) {
    std::cerr << "error: cannot read " << input << "\n";
    return 2;
  }
  std::string name = input == "-" ? "stdin" : input;

  TaskFile file;
  try {
    ParseOptions po;
    po.implicit_mult = implicit_mult;
    file = parse_taskfile(text, po);
  } catch (const TaskFileError& e) {
    std::cerr << e.render(name);
    return exit_code_for(e.code());
  } catch (const Error& e) {
    std::cerr << name << ": error: " << e.what() << "\n";
    return exit_code_for(e.code());
  }

  RunReport report = run_tasks(file, opt, std::cout, std::cerr);
  if (!json_out.empty()) {
    nlohmann::json doc;
    doc["input"] = name;
    doc["field"] = file.field->name();
    doc["tasks"] = report.records;
    doc["exit_code"] = report.exit_code;
    std::ofstream js(json_out);
    if (!js) {
      std::cerr << "error: cannot write " << json_out << "\n";
      return report.exit_code ? report.exit_code : 2;
    }
    js << doc.dump(2) << "\n";
  }
  return report.exit_code;
}
