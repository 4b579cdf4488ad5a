#pragma once

#include <fstream>
#include <sstream>
#include <string>

namespace acnkit::testing {

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(ACNKIT_TEST_DATA_DIR) + "/fixtures/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace acnkit::testing
