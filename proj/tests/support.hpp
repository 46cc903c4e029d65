#pragma once

#include "oscdecay/funcspec.hpp"

#include <fstream>
#include <sstream>
#include <string>

inline std::string fixture_text(const std::string& name) {
  std::ifstream in(std::string(OSCDECAY_FIXTURES) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline oscdecay::MultiplierSpec fixture(const std::string& name) { return oscdecay::parse_spec(fixture_text(name)); }
