#ifndef MEMDYN_TESTS_COMMON_HPP_
#define MEMDYN_TESTS_COMMON_HPP_

#include <fstream>
#include <string>

#include "memdyn/memdyn.hpp"

namespace testutil
{

inline std::string config_path() { return std::string(MEMDYN_CONFIG_DIR) + "/table1.cfg"; }

inline const memdyn::SystemParams & table1()
{
  static const memdyn::SystemParams p = memdyn::load_config_file(config_path());
  return p;
}

/// Table 1 document text with one line replaced (or appended when absent).
inline std::string table1_text_with(const std::string & key, const std::string & value)
{
  std::ifstream in(config_path());
  std::string out;
  bool done = false;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(key + " ", 0) == 0 || line.rfind(key + "=", 0) == 0) {
      if (!value.empty()) {
        out += key + " = " + value + "\n";
      }
      done = true;
    } else {
      out += line + "\n";
    }
  }
  if (!done && !value.empty()) {
    out += key + " = " + value + "\n";
  }
  return out;
}

}  // namespace testutil

#endif  // MEMDYN_TESTS_COMMON_HPP_
