#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>

#include "fracot/config.hpp"

namespace fracot::cli {

enum Status { kOk = 0, kError = 1, kInvariant = 2, kConfig = 3 };

struct Context {
  ExperimentConfig cfg;
  std::filesystem::path out;
  bool verbose = false;
  std::ofstream log;
  void note(const std::string& line);
};

using Command = std::function<int(Context&)>;
const std::map<std::string, Command>& commands();

}  // namespace fracot::cli
