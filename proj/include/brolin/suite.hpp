#pragma once

#include <string>
#include <vector>

#include "brolin/rational_map.hpp"

namespace brolin {

struct SuiteMap {
  std::string id;
  std::string formula;
  std::vector<Complex> numerator;
  std::vector<Complex> denominator;

  RationalMap build(const Tolerances& tol = {}) const { return RationalMap(numerator, denominator, tol); }
};

/// Built-in calibration set: polynomials, the a(z-b)^-d + b family, and one
/// map whose second iterate is not a polynomial.
inline const std::vector<SuiteMap>& calibration_suite() {
  static const std::vector<SuiteMap> suite{
      {"z2", "z^2", {0.0, 0.0, 1.0}, {1.0}},
      {"z2m1", "z^2-1", {-1.0, 0.0, 1.0}, {1.0}},
      {"inv_z2", "1/z^2", {1.0}, {0.0, 0.0, 1.0}},
      {"inv_z3", "1/z^3", {1.0}, {0.0, 0.0, 0.0, 1.0}},
      // 2/(z-1)^3 + 1 = ((z-1)^3 + 2) / (z-1)^3
      {"special_2_1_3", "2/(z-1)^3+1", {1.0, 3.0, -3.0, 1.0}, {-1.0, 3.0, -3.0, 1.0}},
      {"cubic_pole", "(z^3+0.1)/z", {0.1, 0.0, 0.0, 1.0}, {0.0, 1.0}},
  };
  return suite;
}

inline const SuiteMap& suite_map(const std::string& id) {
  for (const auto& m : calibration_suite())
    if (m.id == id) return m;
  throw ValidationError("unknown suite map '" + id + "'");
}

}  // namespace brolin
