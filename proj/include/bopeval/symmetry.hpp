#pragma once

#include "bopeval/geometry.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bopeval {

enum class SymmetryProvenance { Annotated, Searched, DiscretizedContinuous };

std::string to_string(SymmetryProvenance p);
SymmetryProvenance provenance_from_string(const std::string& s);

// Pose-equivalent transforms of one object. The first entry is always the
// identity.
class SymmetrySet {
 public:
  SymmetrySet();  // {identity}

  std::size_t size() const { return transforms_.size(); }
  const std::vector<RigidTransform>& transforms() const { return transforms_; }
  const std::vector<SymmetryProvenance>& provenance() const { return provenance_; }
  const RigidTransform& operator[](std::size_t i) const { return transforms_[i]; }

  // Appends unless a duplicate (see is_duplicate_symmetry) is present.
  // Returns true when appended.
  bool add(const RigidTransform& s, SymmetryProvenance p, double translation_tol);
  void add_unchecked(const RigidTransform& s, SymmetryProvenance p);

 private:
  std::vector<RigidTransform> transforms_;
  std::vector<SymmetryProvenance> provenance_;
};

// A continuous rotational symmetry about the line offset + s * axis.
struct ContinuousSymmetry {
  Vec3 axis = Vec3::UnitZ();  // unit norm
  Vec3 offset = Vec3::Zero();
};

// Two transforms are duplicates when their relative rotation is below 1 degree
// and their translations differ by less than `translation_tol`.
inline constexpr double kDuplicateAngleDeg = 1.0;
bool is_duplicate_symmetry(const RigidTransform& a, const RigidTransform& b,
                           double translation_tol);

// Symmetric Hausdorff distance between two point sets (exact). Throws
// InputError on empty input.
double hausdorff(std::span<const Vec3> a, std::span<const Vec3> b);

// max(15 mm, 0.1 d).
double symmetry_epsilon(double diameter);
double symmetry_epsilon(const TriangleMesh& mesh);

struct SymmetrySearchOptions {
  std::optional<double> epsilon;  // defaults to symmetry_epsilon(mesh)
  int max_fold = 36;              // candidate angles 360/k, k = 2..max_fold
  int refine_iterations = 5;      // nearest-neighbour Procrustes snapping steps
  std::size_t closure_limit = 256;  // skip group closure above this size
  std::size_t workers = 0;          // 0 = hardware concurrency
};

// True iff hausdorff(V, s V) < eps, evaluated exactly.
bool verify_symmetry(std::span<const Vec3> vertices, const RigidTransform& s,
                     double eps);

// Candidate-search for discrete rotational symmetries about the vertex
// centroid. Every member is Hausdorff-verified; transforms that move every
// vertex to within eps of each other are merged, and the result is closed
// under composition (up to closure_limit).
SymmetrySet find_discrete_symmetries(const TriangleMesh& mesh,
                                     const SymmetrySearchOptions& options = {});

// Axes through the vertex centroid for which rotations by 10, 20, ..., 350
// degrees all pass the Hausdorff test. Passing axes within 10 degrees of each
// other form one group. A single group yields its best-fitting axis; several
// groups (e.g. a sphere) yield the first axis of each.
std::vector<ContinuousSymmetry> find_continuous_symmetries(
    const TriangleMesh& mesh, const SymmetrySearchOptions& options = {});

// Rotations about `sym` spaced so that the vertex farthest from the axis
// moves at most 1% of the diameter (chord) between consecutive steps.
// Returns n = ceil(2 pi / theta) rotations by 2 pi i / n, i = 0..n-1, the
// first being the identity. A degenerate axis (all vertices on it) yields
// just the identity and a warning.
std::vector<RigidTransform> discretize_continuous(const ContinuousSymmetry& sym,
                                                  const TriangleMesh& mesh);

// Step angle and count used by discretize_continuous.
struct ContinuousDiscretization {
  double step_angle = 0.0;  // radians
  std::size_t count = 1;
};
ContinuousDiscretization continuous_step(double diameter, double r_max);

struct SymmetryAnalysis {
  double epsilon = 0.0;
  std::vector<ContinuousSymmetry> continuous;
  // Discrete symmetries that are not already generated by the continuous
  // axes; always starts with the identity.
  SymmetrySet discrete;
  // Set when more than one continuous axis was found (e.g. spheres), which
  // needs a human decision. The discrete search is skipped in that case.
  bool needs_review = false;
};

SymmetryAnalysis analyze_symmetries(const TriangleMesh& mesh,
                                    const SymmetrySearchOptions& options = {});

// Full evaluation set: every discretized continuous rotation composed with
// every discrete symmetry.
SymmetrySet expand_symmetries(const std::vector<RigidTransform>& discrete,
                              const std::vector<ContinuousSymmetry>& continuous,
                              const TriangleMesh& mesh,
                              SymmetryProvenance discrete_provenance);

// Manual texture-based filtering. `retain` lists indices into `set`; the
// identity is always kept. std::nullopt means no annotation exists: the set
// passes unchanged with a warning. Throws InputError on unknown indices.
SymmetrySet filter_by_texture(const SymmetrySet& set,
                              const std::optional<std::vector<std::size_t>>& retain,
                              const std::string& object_label = "object");

}  // namespace bopeval
