#ifndef PRC_RIGOR_HPP
#define PRC_RIGOR_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prc/interval.hpp"
#include "prc/trgeom.hpp"

namespace prc {

struct Disc {
  cplx center{};
  double radius = 0.0;
  bool operator==(const Disc&) const = default;
};

/// Box in real coordinates (Re z1, Im z1, ..., Re zn, Im zn), optionally
/// followed by w intervals for graph problems. A coordinate may carry a
/// clipping disc: the region is then box ∩ disc for that complex coordinate.
struct ParamBox {
  std::vector<Interval> z;
  std::vector<Interval> w;
  std::vector<std::optional<Disc>> z_clip;  // empty or size n
  std::vector<std::optional<Disc>> w_clip;  // empty or size n

  static ParamBox polydisc(const std::vector<cplx>& centers,
                           const std::vector<double>& radii);

  int n() const { return static_cast<int>(z.size() / 2); }
  bool has_w() const { return !w.empty(); }

  /// True when box ∩ clip discs is empty.
  bool excluded() const;
  /// A point of box ∩ clip discs (the center when it lies inside).
  std::vector<cplx> sample_z() const;
  int widest_axis() const;
  std::pair<ParamBox, ParamBox> bisect(int axis) const;
  void validate() const;

  bool operator==(const ParamBox&) const = default;
};

struct BoundReport {
  double m_lower = 0.0;
  double big_l_upper = 0.0;
  double residual_upper = 0.0;
  double radius_lower = 0.0;
  int depth = 0;
  std::size_t leaf_count = 0;
};

/// Sound lower bound of m over the box (Gershgorin on B*B); 0 if vacuous.
double bound_m_below(const ProblemSystem& sys, const ParamBox& box);
/// Sound upper bound of L over the box (w(M) ≤ ‖M‖_F).
double bound_l_above(const ProblemSystem& sys, const ParamBox& box);
/// Sound upper bound of the residual sum. Graph boxes must carry w.
double bound_residual_above(const ProblemSystem& sys, const ParamBox& box);

/// m_lower/(c·L_upper) rounded down; +∞ if L_upper = 0 < m_lower.
double radius_lower_bound(double m_lower, double big_l_upper, double factor);

/// All bounds for a single box (depth 0, one leaf).
BoundReport bound_box(const ProblemSystem& sys, const ParamBox& box);

/// Bounds aggregated over a uniform bisection of the box to `depth` levels
/// (min m, max L, max residual, min radius over the leaves).
BoundReport survey_bounds(const ProblemSystem& sys, const ParamBox& box,
                          int depth);

enum class VerifyStatus { Proved, Failed, Inconclusive, Excluded, Unvisited };

std::string to_string(VerifyStatus s);
VerifyStatus verify_status_from_string(const std::string& s);

struct Witness {
  std::vector<cplx> z;
  std::vector<cplx> w;  // graph only
  double residual = 0.0;
  double radius = 0.0;
  bool operator==(const Witness&) const = default;
};

/// One node of a subdivision tree. Children are the two halves of the
/// node's box split along `split_axis` (an index into ParamBox::z).
struct VerifyNode {
  VerifyStatus status = VerifyStatus::Unvisited;
  BoundReport report;
  int split_axis = -1;
  std::vector<VerifyNode> children;
};

struct VerifyOptions {
  int max_depth = 14;
  double margin = 1e-6;
  int threads = 0;  // 0: hardware concurrency
};

struct VerifyResult {
  VerifyStatus status = VerifyStatus::Inconclusive;
  BoundReport report;  // aggregated over evaluated leaves
  VerifyNode tree;
  std::optional<Witness> witness;
};

/// Proves residual < m/(cL) over the box by adaptive bisection.
///
/// PROVED: every leaf satisfies residual_upper·c·L_upper < m_lower·(1−margin)
/// or lies outside the clip discs. FAILED: a sample point with
/// residual ≥ radius was found (attached as witness). INCONCLUSIVE: depth
/// exhausted. Output does not depend on the thread count.
VerifyResult verify_box(const ProblemSystem& sys, const ParamBox& box,
                        const VerifyOptions& opts = {});

/// Proves m > 0 (total reality) over the z-part of the box.
VerifyResult verify_total_reality(const ProblemSystem& sys, const ParamBox& box,
                                  const VerifyOptions& opts = {});

/// Re-walks a recorded tube tree from `box`, recomputing bounds at each leaf.
/// Returns true iff every leaf is PROVED or EXCLUDED under fresh bounds.
bool replay_tube_tree(const ProblemSystem& sys, const ParamBox& box,
                      const VerifyNode& tree, double margin);

/// Point where the tube inequality is tested for a box: sample_z() and the
/// w that maximizes the residual over the box's w region.
Witness tube_sample(const ProblemSystem& sys, const ParamBox& box);

}  // namespace prc

#endif  // PRC_RIGOR_HPP
