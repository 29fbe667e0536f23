#pragma once

// Helpers for tests that drive the command-line binary.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#ifndef NEWTPOT_CLI_PATH
#error "NEWTPOT_CLI_PATH must name the newtpot binary"
#endif

namespace testing_support {

namespace fs = std::filesystem;

inline fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("newtpot_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_text(p)); }

/// Runs `newtpot ARGS`, capturing combined output in `log`; returns the exit status.
inline int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + NEWTPOT_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

inline std::string shell_path(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace testing_support
