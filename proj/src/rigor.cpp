#include "prc/rigor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <thread>

namespace prc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Subtrees rooted at this depth are explored as independent tasks. Fixed so
// the tree shape never depends on the worker count.
constexpr int kParallelDepth = 4;

double down(double v) { return detail::widen_down(v); }
double up(double v) { return detail::widen_up(v); }

std::vector<Interval> z_coords(const ParamBox& box) { return box.z; }

// Rectangle for complex coordinate j of an interval vector.
CInterval rect(const std::vector<Interval>& v, int j) {
  return {v[static_cast<std::size_t>(2 * j)], v[static_cast<std::size_t>(2 * j + 1)]};
}

}  // namespace

// ---------------------------------------------------------------------------
// ParamBox

ParamBox ParamBox::polydisc(const std::vector<cplx>& centers,
                            const std::vector<double>& radii) {
  if (centers.size() != radii.size() || centers.empty())
    throw std::invalid_argument("polydisc: centers and radii must match");
  ParamBox box;
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const double r = radii[j];
    if (!(r > 0.0) || !std::isfinite(r))
      throw std::invalid_argument("polydisc: radius must be positive");
    box.z.emplace_back(centers[j].real() - r, centers[j].real() + r);
    box.z.emplace_back(centers[j].imag() - r, centers[j].imag() + r);
    box.z_clip.push_back(Disc{centers[j], r});
  }
  return box;
}

void ParamBox::validate() const {
  if (z.empty() || z.size() % 2 != 0)
    throw std::invalid_argument("box needs an even, nonzero number of z intervals");
  if (!w.empty() && w.size() != z.size())
    throw std::invalid_argument("box w part must match z dimension");
  for (const auto* part : {&z, &w})
    for (const auto& iv : *part)
      if (!iv.is_finite() || iv.lo > iv.hi)
        throw std::invalid_argument("box interval is empty or non-finite");
  if (!z_clip.empty() && z_clip.size() != static_cast<std::size_t>(n()))
    throw std::invalid_argument("box z clip list has wrong size");
  if (!w_clip.empty() && w_clip.size() != static_cast<std::size_t>(n()))
    throw std::invalid_argument("box w clip list has wrong size");
}

bool ParamBox::excluded() const {
  for (std::size_t j = 0; j < z_clip.size(); ++j) {
    if (!z_clip[j]) continue;
    const Disc& d = *z_clip[j];
    const Interval& x = z[2 * j];
    const Interval& y = z[2 * j + 1];
    const double dx = std::max({0.0, x.lo - d.center.real(), d.center.real() - x.hi});
    const double dy = std::max({0.0, y.lo - d.center.imag(), d.center.imag() - y.hi});
    if (dx * dx + dy * dy > d.radius * d.radius) return true;
  }
  return false;
}

std::vector<cplx> ParamBox::sample_z() const {
  std::vector<cplx> p(static_cast<std::size_t>(n()));
  for (std::size_t j = 0; j < p.size(); ++j) {
    const Interval& x = z[2 * j];
    const Interval& y = z[2 * j + 1];
    p[j] = cplx(x.mid(), y.mid());
    if (j < z_clip.size() && z_clip[j] &&
        std::abs(p[j] - z_clip[j]->center) > z_clip[j]->radius) {
      // Closest point of the rectangle to the disc center lies in both.
      const cplx c = z_clip[j]->center;
      p[j] = cplx(std::clamp(c.real(), x.lo, x.hi), std::clamp(c.imag(), y.lo, y.hi));
    }
  }
  return p;
}

int ParamBox::widest_axis() const {
  int best = 0;
  for (std::size_t a = 1; a < z.size(); ++a)
    if (z[a].width() > z[static_cast<std::size_t>(best)].width()) best = static_cast<int>(a);
  return best;
}

std::pair<ParamBox, ParamBox> ParamBox::bisect(int axis) const {
  if (axis < 0 || static_cast<std::size_t>(axis) >= z.size())
    throw std::out_of_range("bisect: axis out of range");
  ParamBox lo = *this, hi = *this;
  const auto a = static_cast<std::size_t>(axis);
  const double m = z[a].mid();
  lo.z[a].hi = m;
  hi.z[a].lo = m;
  return {std::move(lo), std::move(hi)};
}

// ---------------------------------------------------------------------------
// Bounds

double bound_m_below(const ProblemSystem& sys, const ParamBox& box) {
  const int n = sys.n();
  const int rows = sys.function_count();
  const auto coords = z_coords(box);
  std::vector<CInterval> b(static_cast<std::size_t>(rows * n));
  for (int r = 0; r < rows; ++r)
    for (int j = 0; j < n; ++j)
      b[static_cast<std::size_t>(r * n + j)] = sys.dzbar_poly(r, j).eval(coords);
  auto at = [&](int r, int j) -> const CInterval& {
    return b[static_cast<std::size_t>(r * n + j)];
  };

  // Gershgorin on G = B*B: λ_min ≥ min_j (G_jj − Σ_{k≠j} |G_jk|).
  double lower = kInf;
  for (int j = 0; j < n; ++j) {
    double diag = 0.0;
    for (int r = 0; r < rows; ++r) {
      const double g = at(r, j).mig();
      diag += g * g;
    }
    diag = down(down(diag));
    double off = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      CInterval g{Interval(0.0), Interval(0.0)};
      for (int r = 0; r < rows; ++r) g = g + conj(at(r, j)) * at(r, k);
      off += g.mag();
    }
    lower = std::min(lower, diag - up(up(off)));
  }
  if (!std::isfinite(lower)) return 0.0;
  return std::max(0.0, lower);
}

double bound_l_above(const ProblemSystem& sys, const ParamBox& box) {
  const int n = sys.n();
  const auto coords = z_coords(box);
  double best = 0.0;
  for (int r = 0; r < sys.function_count(); ++r) {
    double fro = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double g = sys.levi_poly(r, j, k).eval(coords).mag();
        fro += g * g;
      }
    best = std::max(best, sqrt_up(up(fro)));
  }
  return std::isnan(best) ? kInf : best;
}

double bound_residual_above(const ProblemSystem& sys, const ParamBox& box) {
  const auto coords = z_coords(box);
  double total = 0.0;
  if (sys.kind() == ProblemKind::Submersion) {
    for (int l = 0; l < sys.function_count(); ++l)
      total += sys.value_poly(l).eval(coords).mag();
    return up(up(total));
  }
  if (!box.has_w())
    throw std::invalid_argument("graph residual bound needs a w box");
  for (int nu = 0; nu < sys.n(); ++nu) {
    const CInterval f = sys.value_poly(nu).eval(coords);
    const CInterval w = rect(box.w, nu);
    double term = (w - f).mag();
    const auto nu_s = static_cast<std::size_t>(nu);
    if (nu_s < box.w_clip.size() && box.w_clip[nu_s]) {
      const Disc& d = *box.w_clip[nu_s];
      term = std::min(term, up(f.max_distance(d.center) + d.radius));
    }
    total += term;
  }
  return up(up(total));
}

double radius_lower_bound(double m_lower, double big_l_upper, double factor) {
  if (!(m_lower > 0.0)) return 0.0;
  if (big_l_upper <= 0.0) return kInf;
  return down(down(m_lower / (factor * big_l_upper)));
}

BoundReport bound_box(const ProblemSystem& sys, const ParamBox& box) {
  BoundReport r;
  r.m_lower = bound_m_below(sys, box);
  r.big_l_upper = bound_l_above(sys, box);
  r.residual_upper = (sys.kind() == ProblemKind::Submersion || box.has_w())
                         ? bound_residual_above(sys, box)
                         : kNaN;
  r.radius_lower = radius_lower_bound(r.m_lower, r.big_l_upper, sys.radius_factor());
  r.depth = 0;
  r.leaf_count = 1;
  return r;
}

namespace {

void merge_leaf(BoundReport& acc, const BoundReport& leaf) {
  acc.m_lower = std::min(acc.m_lower, leaf.m_lower);
  acc.big_l_upper = std::max(acc.big_l_upper, leaf.big_l_upper);
  acc.residual_upper = std::fmax(acc.residual_upper, leaf.residual_upper);
  acc.radius_lower = std::min(acc.radius_lower, leaf.radius_lower);
  acc.depth = std::max(acc.depth, leaf.depth);
}

BoundReport empty_aggregate() {
  BoundReport r;
  r.m_lower = kInf;
  r.big_l_upper = 0.0;
  r.residual_upper = kNaN;
  r.radius_lower = kInf;
  r.depth = 0;
  r.leaf_count = 0;
  return r;
}

void survey(const ProblemSystem& sys, const ParamBox& box, int depth, int level,
            BoundReport& acc) {
  if (box.excluded()) return;
  if (level == depth) {
    BoundReport leaf = bound_box(sys, box);
    leaf.depth = level;
    merge_leaf(acc, leaf);
    ++acc.leaf_count;
    return;
  }
  const auto [lo, hi] = box.bisect(box.widest_axis());
  survey(sys, lo, depth, level + 1, acc);
  survey(sys, hi, depth, level + 1, acc);
}

}  // namespace

BoundReport survey_bounds(const ProblemSystem& sys, const ParamBox& box,
                          int depth) {
  box.validate();
  if (box.n() != sys.n()) throw std::invalid_argument("box dimension mismatch");
  if (depth < 0) throw std::invalid_argument("survey depth must be >= 0");
  BoundReport acc = empty_aggregate();
  survey(sys, box, depth, 0, acc);
  return acc;
}

// ---------------------------------------------------------------------------
// Verification

std::string to_string(VerifyStatus s) {
  switch (s) {
    case VerifyStatus::Proved: return "PROVED";
    case VerifyStatus::Failed: return "FAILED";
    case VerifyStatus::Inconclusive: return "INCONCLUSIVE";
    case VerifyStatus::Excluded: return "EXCLUDED";
    case VerifyStatus::Unvisited: return "UNVISITED";
  }
  return "UNVISITED";
}

VerifyStatus verify_status_from_string(const std::string& s) {
  for (auto v : {VerifyStatus::Proved, VerifyStatus::Failed,
                 VerifyStatus::Inconclusive, VerifyStatus::Excluded,
                 VerifyStatus::Unvisited})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown verify status: " + s);
}

Witness tube_sample(const ProblemSystem& sys, const ParamBox& box) {
  Witness wit;
  wit.z = box.sample_z();
  if (sys.kind() == ProblemKind::Graph) {
    if (!box.has_w()) throw std::invalid_argument("graph tube check needs a w box");
    for (int nu = 0; nu < sys.n(); ++nu) {
      const cplx f = eval_point(sys.table(nu).function(), wit.z);
      const auto nu_s = static_cast<std::size_t>(nu);
      cplx w;
      if (nu_s < box.w_clip.size() && box.w_clip[nu_s]) {
        const Disc& d = *box.w_clip[nu_s];
        const cplx dir = f - d.center;
        w = std::abs(dir) > 0.0 ? d.center - d.radius * dir / std::abs(dir)
                                : d.center + d.radius;
      } else {
        const CInterval r = rect(box.w, nu);
        const double re = std::fabs(r.re.lo - f.real()) > std::fabs(r.re.hi - f.real())
                              ? r.re.lo : r.re.hi;
        const double im = std::fabs(r.im.lo - f.imag()) > std::fabs(r.im.hi - f.imag())
                              ? r.im.lo : r.im.hi;
        w = cplx(re, im);
      }
      wit.w.push_back(w);
    }
  }
  wit.residual = residual(sys, wit.z, wit.w);
  wit.radius = tube_radius(sys, wit.z);
  return wit;
}

namespace {

enum class Mode { Tube, Reality };

bool tube_leaf_proved(const BoundReport& b, double factor, double margin) {
  if (!(b.m_lower > 0.0)) return false;
  const double lhs = up(up(b.residual_upper * up(factor * b.big_l_upper)));
  const double rhs = down(down(b.m_lower * (1.0 - margin)));
  return lhs < rhs;
}

class Engine {
 public:
  Engine(const ProblemSystem& sys, const VerifyOptions& opts, Mode mode)
      : sys_(sys), opts_(opts), mode_(mode) {}

  struct Task {
    ParamBox box;
    int depth;
    VerifyNode* node;
    std::exception_ptr error;
  };

  // Breadth to kParallelDepth, collecting undecided subtrees as tasks.
  void expand_top(const ParamBox& box, int depth, VerifyNode& node,
                  std::vector<Task>& tasks) {
    if (depth >= std::min(kParallelDepth, opts_.max_depth)) {
      tasks.push_back(Task{box, depth, &node, nullptr});
      return;
    }
    if (!decide(box, depth, node)) return;
    const int axis = box.widest_axis();
    node.split_axis = axis;
    node.children.resize(2);
    const auto [lo, hi] = box.bisect(axis);
    expand_top(lo, depth + 1, node.children[0], tasks);
    expand_top(hi, depth + 1, node.children[1], tasks);
  }

  // Depth-first; stops at the first FAILED leaf.
  bool dfs(const ParamBox& box, int depth, VerifyNode& node) {
    if (!decide(box, depth, node)) return node.status != VerifyStatus::Failed;
    const int axis = box.widest_axis();
    node.split_axis = axis;
    node.children.resize(2);
    const auto [lo, hi] = box.bisect(axis);
    if (!dfs(lo, depth + 1, node.children[0])) return false;
    return dfs(hi, depth + 1, node.children[1]);
  }

 private:
  // Sets a terminal status and returns false, or returns true to split.
  bool decide(const ParamBox& box, int depth, VerifyNode& node) {
    node.report.depth = depth;
    if (box.excluded()) {
      node.status = VerifyStatus::Excluded;
      return false;
    }
    if (mode_ == Mode::Tube) {
      const int d = node.report.depth;
      node.report = bound_box(sys_, box);
      node.report.depth = d;
      if (tube_leaf_proved(node.report, sys_.radius_factor(), opts_.margin)) {
        node.status = VerifyStatus::Proved;
        return false;
      }
      const Witness w = tube_sample(sys_, box);
      if (w.residual >= w.radius) {
        node.status = VerifyStatus::Failed;
        return false;
      }
    } else {
      node.report.m_lower = bound_m_below(sys_, box);
      node.report.big_l_upper = kNaN;
      node.report.residual_upper = kNaN;
      node.report.radius_lower = kNaN;
      if (node.report.m_lower > 0.0) {
        node.status = VerifyStatus::Proved;
        return false;
      }
      if (!point_totally_real(box.sample_z())) {
        node.status = VerifyStatus::Failed;
        return false;
      }
    }
    if (depth >= opts_.max_depth) {
      node.status = VerifyStatus::Inconclusive;
      return false;
    }
    node.status = VerifyStatus::Unvisited;  // resolved from children
    return true;
  }

  bool point_totally_real(const std::vector<cplx>& z) const {
    if (sys_.kind() == ProblemKind::Graph)
      return is_totally_real_graph(sys_, z).totally_real;
    try {
      return is_totally_real_submersion(sys_, z).totally_real;
    } catch (const NotSubmersion&) {
      return false;
    }
  }

  const ProblemSystem& sys_;
  VerifyOptions opts_;
  Mode mode_;
};

// Resolves internal statuses, subtree leaf counts and the aggregate report;
// records the first FAILED leaf box in tree order.
void finalize(VerifyNode& node, const ParamBox& box, BoundReport& acc,
              std::optional<ParamBox>& failed_box) {
  if (node.children.empty()) {
    node.report.leaf_count = node.status == VerifyStatus::Unvisited ? 0 : 1;
    if (node.status == VerifyStatus::Unvisited) return;
    ++acc.leaf_count;
    acc.depth = std::max(acc.depth, node.report.depth);
    if (node.status == VerifyStatus::Excluded) return;
    merge_leaf(acc, node.report);
    if (node.status == VerifyStatus::Failed && !failed_box) failed_box = box;
    return;
  }
  const auto [lo, hi] = box.bisect(node.split_axis);
  finalize(node.children[0], lo, acc, failed_box);
  finalize(node.children[1], hi, acc, failed_box);
  bool any_failed = false, any_open = false, all_excluded = true;
  std::size_t leaves = 0;
  for (const auto& c : node.children) {
    leaves += c.report.leaf_count;
    any_failed |= c.status == VerifyStatus::Failed;
    any_open |= c.status == VerifyStatus::Inconclusive;
    all_excluded &= c.status == VerifyStatus::Excluded;
  }
  node.report.leaf_count = leaves;
  if (any_failed) node.status = VerifyStatus::Failed;
  else if (any_open) node.status = VerifyStatus::Inconclusive;
  else if (all_excluded) node.status = VerifyStatus::Excluded;
  else node.status = VerifyStatus::Proved;
}

VerifyResult run(const ProblemSystem& sys, const ParamBox& box,
                 const VerifyOptions& opts, Mode mode) {
  box.validate();
  if (box.n() != sys.n()) throw std::invalid_argument("box dimension mismatch");
  if (opts.max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
  if (!(opts.margin >= 0.0 && opts.margin < 1.0))
    throw std::invalid_argument("margin must lie in [0, 1)");
  if (mode == Mode::Tube && sys.kind() == ProblemKind::Graph && !box.has_w())
    throw std::invalid_argument("graph tube verification needs a w box");

  Engine engine(sys, opts, mode);
  VerifyResult result;
  std::vector<Engine::Task> tasks;
  engine.expand_top(box, 0, result.tree, tasks);

  unsigned workers = opts.threads > 0 ? static_cast<unsigned>(opts.threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(tasks.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        engine.dfs(tasks[i].box, tasks[i].depth, *tasks[i].node);
      } catch (...) {
        tasks[i].error = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& t : tasks)
    if (t.error) std::rethrow_exception(t.error);

  BoundReport acc = empty_aggregate();
  std::optional<ParamBox> failed_box;
  finalize(result.tree, box, acc, failed_box);
  result.report = acc;
  result.status = result.tree.status;
  if (result.status == VerifyStatus::Excluded) result.status = VerifyStatus::Proved;
  if (failed_box) {
    if (mode == Mode::Tube) {
      result.witness = tube_sample(sys, *failed_box);
    } else {
      Witness w;
      w.z = failed_box->sample_z();
      w.radius = m_value(sys, w.z);
      result.witness = w;
    }
  }
  return result;
}

}  // namespace

VerifyResult verify_box(const ProblemSystem& sys, const ParamBox& box,
                        const VerifyOptions& opts) {
  return run(sys, box, opts, Mode::Tube);
}

VerifyResult verify_total_reality(const ProblemSystem& sys, const ParamBox& box,
                                  const VerifyOptions& opts) {
  return run(sys, box, opts, Mode::Reality);
}

namespace {

bool replay_node(const ProblemSystem& sys, const ParamBox& box,
                 const VerifyNode& node, double margin) {
  if (node.children.empty()) {
    if (node.status == VerifyStatus::Excluded) return box.excluded();
    if (node.status != VerifyStatus::Proved) return false;
    if (box.excluded()) return true;
    return tube_leaf_proved(bound_box(sys, box), sys.radius_factor(), margin);
  }
  if (node.children.size() != 2 || node.split_axis < 0 ||
      static_cast<std::size_t>(node.split_axis) >= box.z.size())
    return false;
  const auto [lo, hi] = box.bisect(node.split_axis);
  return replay_node(sys, lo, node.children[0], margin) &&
         replay_node(sys, hi, node.children[1], margin);
}

}  // namespace

bool replay_tube_tree(const ProblemSystem& sys, const ParamBox& box,
                      const VerifyNode& tree, double margin) {
  box.validate();
  if (box.n() != sys.n()) return false;
  if (sys.kind() == ProblemKind::Graph && !box.has_w()) return false;
  return replay_node(sys, box, tree, margin);
}

}  // namespace prc
