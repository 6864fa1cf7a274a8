#pragma once

// In-process driver for the command line front end.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "finslerlab/cli.hpp"

namespace clirun {

struct Outcome {
  int code = -1;
  std::string out, err;
};

inline Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "finslerlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = finslerlab::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

inline std::string config(const std::string& name) { return std::string(FINSLERLAB_CONFIG_DIR) + "/" + name; }

inline std::filesystem::path scratch_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("finslerlab_" + tag);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string write_file(const std::string& tag, const std::string& name, const std::string& text) {
  const auto path = scratch_dir(tag) / name;
  std::ofstream(path, std::ios::binary) << text;
  return path.string();
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace clirun
