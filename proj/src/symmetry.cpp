#include "bopeval/symmetry.hpp"

#include "bopeval/error.hpp"
#include "bopeval/parallel.hpp"
#include "bopeval/point_grid.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace bopeval {

std::string to_string(SymmetryProvenance p) {
  switch (p) {
    case SymmetryProvenance::Annotated: return "annotated";
    case SymmetryProvenance::Searched: return "searched";
    case SymmetryProvenance::DiscretizedContinuous: return "discretized-continuous";
  }
  return "unknown";
}

SymmetryProvenance provenance_from_string(const std::string& s) {
  if (s == "annotated") return SymmetryProvenance::Annotated;
  if (s == "searched") return SymmetryProvenance::Searched;
  if (s == "discretized-continuous") return SymmetryProvenance::DiscretizedContinuous;
  throw InputError("unknown symmetry provenance '" + s + "'");
}

SymmetrySet::SymmetrySet()
    : transforms_{RigidTransform::identity()},
      provenance_{SymmetryProvenance::Annotated} {}

bool SymmetrySet::add(const RigidTransform& s, SymmetryProvenance p,
                      double translation_tol) {
  for (const auto& t : transforms_) {
    if (is_duplicate_symmetry(t, s, translation_tol)) return false;
  }
  add_unchecked(s, p);
  return true;
}

void SymmetrySet::add_unchecked(const RigidTransform& s, SymmetryProvenance p) {
  transforms_.push_back(s);
  provenance_.push_back(p);
}

bool is_duplicate_symmetry(const RigidTransform& a, const RigidTransform& b,
                           double translation_tol) {
  const double angle = rotation_angle(a.rotation().transpose() * b.rotation());
  return angle < kDuplicateAngleDeg * std::numbers::pi / 180.0 &&
         (a.translation() - b.translation()).norm() < translation_tol;
}

double hausdorff(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw InputError("hausdorff: empty point set");
  const PointGrid grid_a(a);
  const PointGrid grid_b(b);
  return std::max(directed_hausdorff(a, grid_b), directed_hausdorff(b, grid_a));
}

double symmetry_epsilon(double diameter) { return std::max(15.0, 0.1 * diameter); }

double symmetry_epsilon(const TriangleMesh& mesh) {
  return symmetry_epsilon(mesh.diameter());
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAxisMergeDeg = 1.0;
constexpr double kContinuousAxisMergeDeg = 10.0;
constexpr std::size_t kAxesPerSphereCell = 8;

double deg(double d) { return d * kPi / 180.0; }

// Verification context: the canonical vertices indexed with cell size eps.
class Verifier {
 public:
  Verifier(std::span<const Vec3> vertices, double eps)
      : vertices_(vertices), eps_(eps), grid_(vertices, eps) {}

  double eps() const { return eps_; }
  const PointGrid& grid() const { return grid_; }

  // h(V, S V) < eps, via directed(S V -> V) and directed(S^-1 V -> V).
  bool passes(const RigidTransform& s) const {
    return directed_below(s) && directed_below(s.inverse());
  }

  double residual(const RigidTransform& s) const {
    double worst = 0.0;
    for (const RigidTransform& t : {s, s.inverse()}) {
      for (const Vec3& x : vertices_) {
        worst = std::max(worst, grid_.nearest_distance(t.apply(x)));
      }
    }
    return worst;
  }

 private:
  bool directed_below(const RigidTransform& s) const {
    for (const Vec3& x : vertices_) {
      if (!grid_.has_point_within(s.apply(x), eps_)) return false;
    }
    return true;
  }

  std::span<const Vec3> vertices_;
  double eps_;
  PointGrid grid_;
};

// Nearest-neighbour Procrustes about `center`: snaps an approximate symmetry
// onto the rotation that best maps each vertex to its current match.
RigidTransform refine(const RigidTransform& s, std::span<const Vec3> vertices,
                      const PointGrid& grid, const Vec3& center, int iterations) {
  RigidTransform current = s;
  std::vector<std::uint32_t> match(vertices.size(), 0);
  std::vector<std::uint32_t> previous;
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      match[i] = grid.nearest(current.apply(vertices[i])).index;
    }
    if (match == previous) break;
    Mat3 h = Mat3::Zero();
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      h += (vertices[i] - center) * (vertices[match[i]] - center).transpose();
    }
    Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 fix = Mat3::Identity();
    fix(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
    const Mat3 r = svd.matrixV() * fix * svd.matrixU().transpose();
    current = RigidTransform(r, center - r * center, 1e-6);
    previous = match;
  }
  return current;
}

// 252 directions of a frequency-5 geodesic icosahedron.
std::vector<Vec3> geodesic_sphere() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  const std::vector<Vec3> ico = {
      {-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
  const int faces[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  constexpr int kFreq = 5;
  std::vector<Vec3> out;
  for (const auto& f : faces) {
    for (int i = 0; i <= kFreq; ++i) {
      for (int j = 0; i + j <= kFreq; ++j) {
        const int k = kFreq - i - j;
        const Vec3 p = ((i * ico[f[0]] + j * ico[f[1]] + k * ico[f[2]]) / kFreq).normalized();
        const bool seen = std::any_of(out.begin(), out.end(), [&](const Vec3& q) {
          return (p - q).norm() < 1e-9;
        });
        if (!seen) out.push_back(p);
      }
    }
  }
  return out;
}

const std::vector<Vec3>& sphere_directions() {
  static const std::vector<Vec3> dirs = geodesic_sphere();
  return dirs;
}

// Candidate symmetry axes through the centroid, in a deterministic order.
// Directions come from the principal axes, triangle normals, and the
// centroid-to-feature directions (vertices, edge midpoints, triangle
// centroids); they are clustered on the geodesic sphere (antipodes
// identified), deduplicated at 1 degree within a cell, and capped per cell.
// The sphere directions themselves close the list.
std::vector<Vec3> candidate_axes(const TriangleMesh& mesh, const Vec3& c) {
  const auto& verts = mesh.vertices();
  const auto& sphere = sphere_directions();
  const double scale = std::max(mesh.diameter(), 1e-12);
  const double cos_merge = std::cos(deg(kAxisMergeDeg));

  std::vector<std::vector<Vec3>> cells(sphere.size());
  std::vector<Vec3> axes;
  auto offer = [&](const Vec3& raw, bool capped) {
    const double n = raw.norm();
    if (!(n > 1e-9 * scale)) return;
    const Vec3 d = raw / n;
    std::size_t best = 0;
    double best_dot = -1.0;
    for (std::size_t i = 0; i < sphere.size(); ++i) {
      const double v = std::abs(d.dot(sphere[i]));
      if (v > best_dot) {
        best_dot = v;
        best = i;
      }
    }
    auto& cell = cells[best];
    if (capped && cell.size() >= kAxesPerSphereCell) return;
    for (const Vec3& a : cell) {
      if (std::abs(a.dot(d)) >= cos_merge) return;
    }
    cell.push_back(d);
    axes.push_back(d);
  };

  // Principal axes.
  Mat3 cov = Mat3::Zero();
  for (const Vec3& v : verts) cov += (v - c) * (v - c).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  for (int i = 2; i >= 0; --i) offer(eig.eigenvectors().col(i), false);

  // Triangle normals, then feature directions ordered by distance from the
  // centroid (extreme features first).
  for (const Triangle& t : mesh.triangles()) {
    offer((verts[t[1]] - verts[t[0]]).cross(verts[t[2]] - verts[t[0]]), true);
  }
  std::vector<Vec3> features(verts.begin(), verts.end());
  for (const Triangle& t : mesh.triangles()) {
    for (int e = 0; e < 3; ++e) features.push_back((verts[t[e]] + verts[t[(e + 1) % 3]]) / 2.0);
    features.push_back((verts[t[0]] + verts[t[1]] + verts[t[2]]) / 3.0);
  }
  std::vector<std::size_t> order(features.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return (features[a] - c).squaredNorm() > (features[b] - c).squaredNorm();
  });
  for (std::size_t i : order) offer(features[i] - c, true);

  for (const Vec3& s : sphere) offer(s, false);
  return axes;
}

struct Found {
  RigidTransform transform;
  double residual;
};

// Decides whether two transforms move every vertex to within eps of each
// other, in which case the verification test cannot tell them apart. The
// RMS displacement (a lower bound on the maximum) and a norm bound settle
// most pairs without scanning the vertices.
class Separation {
 public:
  Separation(std::span<const Vec3> vertices, const Vec3& center, double eps)
      : vertices_(vertices), center_(center), eps_(eps) {
    for (const Vec3& v : vertices) {
      const Vec3 y = v - center;
      covariance_ += y * y.transpose();
      radius_ = std::max(radius_, y.norm());
    }
    covariance_ /= static_cast<double>(std::max<std::size_t>(vertices.size(), 1));
  }

  bool same(const RigidTransform& a, const RigidTransform& b) const {
    const Mat3 m = a.rotation() - b.rotation();
    const Vec3 t = a.apply(center_) - b.apply(center_);
    const double rms2 = (m * covariance_ * m.transpose()).trace() + t.squaredNorm();
    if (rms2 >= eps_ * eps_) return false;
    if (m.norm() * radius_ + t.norm() < eps_) return true;
    for (const Vec3& x : vertices_) {
      if ((a.apply(x) - b.apply(x)).norm() >= eps_) return false;
    }
    return true;
  }

 private:
  std::span<const Vec3> vertices_;
  Vec3 center_;
  double eps_;
  Mat3 covariance_ = Mat3::Zero();
  double radius_ = 0.0;
};

// Appends unless an indistinguishable transform exists; one with a worse fit
// is replaced (the identity is never replaced).
void merge_found(std::vector<Found>& set, const Found& f, const Separation& sep) {
  for (Found& g : set) {
    if (sep.same(g.transform, f.transform)) {
      if (f.residual < g.residual && &g != &set.front()) g = f;
      return;
    }
  }
  set.push_back(f);
}

double resolve_eps(const TriangleMesh& mesh, const SymmetrySearchOptions& options) {
  const double eps = options.epsilon.value_or(symmetry_epsilon(mesh));
  if (!(eps > 0.0)) throw InputError("symmetry epsilon must be positive");
  return eps;
}

void require_vertices(const TriangleMesh& mesh) {
  if (mesh.vertices().empty()) throw InputError("symmetry search on an empty mesh");
}

std::vector<Found> search_discrete(const TriangleMesh& mesh,
                                   const SymmetrySearchOptions& options,
                                   const Verifier& verifier, const Vec3& c) {
  const auto& verts = mesh.vertices();
  const Separation sep(verts, c, verifier.eps());
  const std::vector<Vec3> axes = candidate_axes(mesh, c);
  const int folds = std::max(1, options.max_fold - 1);

  std::vector<std::optional<Found>> results(axes.size() * folds);
  parallel_for(results.size(), options.workers, [&](std::size_t task) {
    const Vec3& axis = axes[task / folds];
    const int k = 2 + static_cast<int>(task % folds);
    const RigidTransform s = RigidTransform::about_axis(axis, c, 2.0 * kPi / k);
    if (!verifier.passes(s)) return;
    RigidTransform r = refine(s, verts, verifier.grid(), c, options.refine_iterations);
    if (!verifier.passes(r)) r = s;
    results[task] = Found{r, verifier.residual(r)};
  });

  std::vector<Found> found{{RigidTransform::identity(), 0.0}};
  for (const auto& r : results) {
    if (r) merge_found(found, *r, sep);
  }

  // Group closure over verified products.
  std::size_t checked = 1;
  while (checked < found.size()) {
    if (found.size() > options.closure_limit) {
      warn("symmetry search: " + std::to_string(found.size()) +
           " transforms exceed the closure limit; composition closure skipped");
      break;
    }
    const std::size_t end = found.size();
    for (std::size_t i = 0; i < end; ++i) {
      for (std::size_t j = (i < checked ? checked : 0); j < end; ++j) {
        for (const RigidTransform& p : {compose(found[i].transform, found[j].transform),
                                        compose(found[j].transform, found[i].transform)}) {
          const bool known = std::any_of(found.begin(), found.end(), [&](const Found& g) {
            return sep.same(g.transform, p);
          });
          if (known || !verifier.passes(p)) continue;
          merge_found(found, {p, verifier.residual(p)}, sep);
        }
      }
    }
    checked = end;
  }
  return found;
}

double distance_to_axis(const Vec3& x, const ContinuousSymmetry& sym) {
  const Vec3 rel = x - sym.offset;
  return (rel - rel.dot(sym.axis) * sym.axis).norm();
}

// True when `t` is a rotation about the continuous axis (or the identity).
bool generated_by(const RigidTransform& t, const ContinuousSymmetry& sym, double tol) {
  const Eigen::AngleAxisd aa(t.rotation());
  if (aa.angle() >= deg(kDuplicateAngleDeg) &&
      std::abs(aa.axis().dot(sym.axis)) < std::cos(deg(kAxisMergeDeg))) {
    return false;
  }
  return (t.apply(sym.offset) - sym.offset).norm() < tol;
}

}  // namespace

bool verify_symmetry(std::span<const Vec3> vertices, const RigidTransform& s,
                     double eps) {
  if (vertices.empty()) throw InputError("verify_symmetry: empty vertex set");
  return Verifier(vertices, eps).passes(s);
}

SymmetrySet find_discrete_symmetries(const TriangleMesh& mesh,
                                     const SymmetrySearchOptions& options) {
  require_vertices(mesh);
  const double eps = resolve_eps(mesh, options);
  const Vec3 c = centroid(mesh.vertices());
  const Verifier verifier(mesh.vertices(), eps);
  const std::vector<Found> found = search_discrete(mesh, options, verifier, c);
  SymmetrySet set;
  for (std::size_t i = 1; i < found.size(); ++i) {
    set.add_unchecked(found[i].transform, SymmetryProvenance::Searched);
  }
  return set;
}

std::vector<ContinuousSymmetry> find_continuous_symmetries(
    const TriangleMesh& mesh, const SymmetrySearchOptions& options) {
  require_vertices(mesh);
  const double eps = resolve_eps(mesh, options);
  const Vec3 c = centroid(mesh.vertices());
  const Verifier verifier(mesh.vertices(), eps);
  const std::vector<Vec3> axes = candidate_axes(mesh, c);

  std::vector<std::uint8_t> passes(axes.size(), 0);
  parallel_for(axes.size(), options.workers, [&](std::size_t i) {
    for (int step = 1; step < 36; ++step) {
      if (!verifier.passes(RigidTransform::about_axis(axes[i], c, deg(10.0 * step)))) return;
    }
    passes[i] = 1;
  });

  // Group passing axes around the first member within 10 degrees.
  const double cos_merge = std::cos(deg(kContinuousAxisMergeDeg));
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (!passes[i]) continue;
    auto it = std::find_if(clusters.begin(), clusters.end(), [&](const auto& cl) {
      return std::abs(axes[cl.front()].dot(axes[i])) >= cos_merge;
    });
    if (it == clusters.end()) {
      clusters.push_back({i});
    } else {
      it->push_back(i);
    }
  }
  if (clusters.empty()) return {};
  if (clusters.size() > 1) {
    std::vector<ContinuousSymmetry> out;
    for (const auto& cl : clusters) out.push_back({axes[cl.front()], c});
    return out;
  }

  const std::vector<std::size_t>& members = clusters.front();
  std::vector<double> residual(members.size(), 0.0);
  parallel_for(members.size(), options.workers, [&](std::size_t m) {
    for (int step = 1; step < 36; ++step) {
      residual[m] = std::max(residual[m], verifier.residual(RigidTransform::about_axis(
                                              axes[members[m]], c, deg(10.0 * step))));
    }
  });
  const auto best = std::min_element(residual.begin(), residual.end()) - residual.begin();
  return {{axes[members[static_cast<std::size_t>(best)]], c}};
}

ContinuousDiscretization continuous_step(double diameter, double r_max) {
  if (!(r_max > 0.0)) return {0.0, 1};
  const double ratio = std::min(1.0, 0.01 * diameter / (2.0 * r_max));
  const double theta = 2.0 * std::asin(ratio);
  if (!(theta > 0.0)) return {0.0, 1};
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * kPi / theta - 1e-9));
  return {theta, std::max<std::size_t>(n, 1)};
}

std::vector<RigidTransform> discretize_continuous(const ContinuousSymmetry& sym,
                                                  const TriangleMesh& mesh) {
  if (std::abs(sym.axis.norm() - 1.0) > 1e-9) {
    throw InputError("continuous symmetry axis must have unit norm");
  }
  double r_max = 0.0;
  for (const Vec3& v : mesh.vertices()) r_max = std::max(r_max, distance_to_axis(v, sym));
  if (r_max <= 1e-12 * std::max(1.0, mesh.diameter())) {
    warn("continuous symmetry axis is degenerate (all vertices on the axis); "
         "using the identity only");
    return {RigidTransform::identity()};
  }
  const ContinuousDiscretization step = continuous_step(mesh.diameter(), r_max);
  std::vector<RigidTransform> out;
  out.reserve(step.count);
  out.push_back(RigidTransform::identity());
  for (std::size_t i = 1; i < step.count; ++i) {
    const double angle = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(step.count);
    out.push_back(RigidTransform::about_axis(sym.axis, sym.offset, angle));
  }
  return out;
}

SymmetryAnalysis analyze_symmetries(const TriangleMesh& mesh,
                                    const SymmetrySearchOptions& options) {
  require_vertices(mesh);
  SymmetryAnalysis out;
  out.epsilon = resolve_eps(mesh, options);
  out.continuous = find_continuous_symmetries(mesh, options);
  out.needs_review = out.continuous.size() > 1;
  if (out.needs_review) return out;

  const SymmetrySet all = find_discrete_symmetries(mesh, options);
  const double tol = out.epsilon / 10.0;
  std::vector<RigidTransform> kept{RigidTransform::identity()};
  for (std::size_t i = 1; i < all.size(); ++i) {
    const RigidTransform& d = all[i];
    const bool redundant = std::any_of(kept.begin(), kept.end(), [&](const RigidTransform& k) {
      const RigidTransform rel = compose(k.inverse(), d);
      return std::any_of(out.continuous.begin(), out.continuous.end(),
                         [&](const ContinuousSymmetry& s) { return generated_by(rel, s, tol); });
    });
    if (!redundant) {
      kept.push_back(d);
      out.discrete.add_unchecked(d, SymmetryProvenance::Searched);
    }
  }
  return out;
}

SymmetrySet expand_symmetries(const std::vector<RigidTransform>& discrete,
                              const std::vector<ContinuousSymmetry>& continuous,
                              const TriangleMesh& mesh,
                              SymmetryProvenance discrete_provenance) {
  const double tol = symmetry_epsilon(mesh) / 10.0;
  struct Entry {
    RigidTransform t;
    SymmetryProvenance p;
  };
  std::vector<Entry> current{{RigidTransform::identity(), discrete_provenance}};
  for (const RigidTransform& d : discrete) current.push_back({d, discrete_provenance});

  for (const ContinuousSymmetry& sym : continuous) {
    const auto rotations = discretize_continuous(sym, mesh);
    std::vector<Entry> next;
    next.reserve(rotations.size() * current.size());
    for (std::size_t r = 0; r < rotations.size(); ++r) {
      for (const Entry& e : current) {
        next.push_back({compose(rotations[r], e.t),
                        r == 0 ? e.p : SymmetryProvenance::DiscretizedContinuous});
      }
    }
    current = std::move(next);
  }

  SymmetrySet set;
  for (std::size_t i = 1; i < current.size(); ++i) {
    set.add(current[i].t, current[i].p, tol);
  }
  return set;
}

SymmetrySet filter_by_texture(const SymmetrySet& set,
                              const std::optional<std::vector<std::size_t>>& retain,
                              const std::string& object_label) {
  if (!retain) {
    warn(object_label + ": no texture annotation; keeping all " +
         std::to_string(set.size()) + " geometric symmetries");
    return set;
  }
  std::vector<bool> keep(set.size(), false);
  keep[0] = true;
  for (std::size_t idx : *retain) {
    if (idx >= set.size()) {
      throw InputError(object_label + ": texture annotation references symmetry " +
                       std::to_string(idx) + " but only " + std::to_string(set.size()) +
                       " exist");
    }
    keep[idx] = true;
  }
  SymmetrySet out;
  for (std::size_t i = 1; i < set.size(); ++i) {
    if (keep[i]) out.add_unchecked(set[i], set.provenance()[i]);
  }
  return out;
}

}  // namespace bopeval
