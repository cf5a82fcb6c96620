#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "brolin/suite.hpp"

namespace brolin::test {

inline const nlohmann::json& oracles() {
  static const nlohmann::json j = [] {
    std::ifstream in(std::string(BROLIN_TEST_DATA) + "/golden/oracles.json");
    return nlohmann::json::parse(in);
  }();
  return j;
}

inline Complex cx(const nlohmann::json& pair) { return {pair[0].get<double>(), pair[1].get<double>()}; }

inline RationalMap suite(const std::string& id) { return suite_map(id).build(); }

}  // namespace brolin::test
