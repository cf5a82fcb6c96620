#pragma once

namespace brolin::calibration {

// Verdict thresholds, produced by tools/calibrate.cpp at the reference
// settings (the Config defaults) over seeds 1, 2, 3 of the five equality-case
// suite maps. The raw numbers are in calibration/calibration_log.txt.
// Rerun and bump the version whenever the pipeline or the defaults change.
inline constexpr const char* kVersion = "calibration-1";

// 3 x the largest equality-case spread (2.671261e-10, z2).
inline constexpr double kTauSpread = 8.013784e-10;

// The largest equality-case sampler-vs-harmonic discrepancy (z2m1, seed 3).
inline constexpr double kEqualityBand = 1.038182e-03;

}  // namespace brolin::calibration
