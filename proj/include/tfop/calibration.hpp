#pragma once

namespace tfop::calibration {

// Constants recorded from the first run of the bundled reference
// configurations and committed; later runs must stay within the stated
// drift bands. Regenerate by running the `bound` and `norms` experiments
// with the default configs and pasting the reported values.

// bound experiment, reference configuration (bilinear phase, unit weights,
// Gaussian amplitude, self-dual grid N = 8, p = 2, seed 12345).
inline constexpr double kBoundRatioReference = 6.8775900552593587e-16;
inline constexpr double kBoundRatioDrift = 0.02;

// t = 0 kernel/symbol norm ratio over the bundled 10-member Gaussian family
// (self-dual grid N = 32, p = 4, unit weights).
inline constexpr double kKernelSymbolRatio = 0.37740039515233154;
inline constexpr double kKernelSymbolDrift = 0.02;

// Patch-norm / modulation-norm ratio interval over the bundled 20-member
// Gaussian family (L = 8, N = 64, p = q = 2, unit weight).
inline constexpr double kPatchRatioLow = 0.5504701874789566;
inline constexpr double kPatchRatioHigh = 0.55678499008500082;
inline constexpr double kPatchIntervalMargin = 0.01;

}  // namespace tfop::calibration
