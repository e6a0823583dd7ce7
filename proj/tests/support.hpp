#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testsupport {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(CONTRACTOR_FIXTURES) / rel; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + p.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline std::string read_fixture(const std::string& rel) { return read_file(fixture(rel)); }

}  // namespace testsupport
