#pragma once

#include "bopeval/bop_io.hpp"

#include <filesystem>
#include <vector>

namespace oracle {

struct Recalls {
  double vsd = 0.0;
  double mssd = 0.0;
  double mspd = 0.0;
};

// Average recalls on the synthetic mini-dataset, counted cell by cell with
// ray-cast renders, pixel-loop masks and VSD, vertex-loop MSSD/MSPD and the
// reference greedy matcher. The cube uses its full rotation group; the
// tetrahedron has none.
Recalls minidataset_recalls(const std::filesystem::path& root,
                            const std::filesystem::path& targets,
                            const std::vector<bopeval::PoseEstimate>& estimates);

}  // namespace oracle
