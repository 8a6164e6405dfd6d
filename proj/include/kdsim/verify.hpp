#pragma once

#include <string>
#include <vector>

namespace kdsim {

struct VerifyCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast built-in oracle checks: wall-model numbers, Bessel sum rule, Gaussian
/// beam spreading on both propagation routes, route agreement, laser-phase
/// unitarity and vector-kernel equivalence. The propagation checks use a
/// small grid whose sample count can be forced with KDSIM_VERIFY_SAMPLES; a
/// count that violates the sampling criterion makes those checks fail with the
/// required size in the detail.
std::vector<VerifyCheck> run_verification();

}  // namespace kdsim
