#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace bopeval {

struct SelfCheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  std::chrono::duration<double> elapsed{};
};

struct SelfCheckOptions {
  unsigned seed = 20200823;
  // Feeds one deliberately wrong fixture to every check, which must then fail.
  bool corrupt = false;
};

// Compares the engine against brute-force references on generated fixtures:
// pixel-loop VSD, triple-loop MSSD/MSPD, double-loop Hausdorff, and the cube
// symmetry group.
std::vector<SelfCheckResult> run_self_checks(const SelfCheckOptions& options = {});

}  // namespace bopeval
