#pragma once

namespace brolin {

/// Every numeric threshold used by the library, in one place so it can be
/// overridden from a tolerance file and echoed into reports.
struct Tolerances {
  double lead = 1e-12;          // leading-coefficient cutoff, relative to max |coeff|
  double res = 1e-12;           // resultant non-degeneracy, relative
  double gcd = 1e-9;            // |num(r)| at denominator roots, relative
  double form = 1e-9;           // special-form coefficient match, relative
  double root_residual = 1e-12; // Aberth stopping rule (backward error)
  int root_max_iter = 500;
  double cluster = 1e-6;        // multiplicity clustering radius (scaled by max(1,|r|))
  double escape = 1e-12;        // escape-rate series truncation
  int escape_depth = 64;
  double pole_guard = 1e-12;    // |F_0^{(n)}(1,z)| / ||F^n(1,z)|| below this => pole
  double trace = 1e-3;          // lemniscate vertex self-consistency
  double normalization = 1e-6;  // post-check of G^{cF}(0,1) = -I
  double infinity_chordal = 0.05;
};

}  // namespace brolin
