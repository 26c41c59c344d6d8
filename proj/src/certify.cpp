#include "prc/certify.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace prc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform bisection depth for the w-enclosure of F over the region.
constexpr int kEnclosureDepth = 14;

Json cplx_json(cplx c) { return Json::array({format_double(c.real()), format_double(c.imag())}); }

cplx parse_cplx(const Json& j) {
  if (j.is_number() || j.is_string()) return {parse_double(j), 0.0};
  if (!j.is_array() || j.size() != 2)
    throw InputError("complex value must be [re, im]");
  return {parse_double(j[0]), parse_double(j[1])};
}

std::vector<cplx> parse_cplx_list(const Json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<cplx> out;
  for (const auto& e : j) out.push_back(parse_cplx(e));
  return out;
}

std::vector<double> parse_double_list(const Json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(parse_double(e));
  return out;
}

int parse_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw InputError(std::string(what) + " must be an integer");
  return j.get<int>();
}

const Json& require(const Json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing key '") + key + "'");
  return j.at(key);
}

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed,
                    const char* where) {
  if (!j.is_object()) throw InputError(std::string(where) + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key))
      throw InputError("unknown key '" + key + "' in " + where);
}

}  // namespace

// ---------------------------------------------------------------------------
// Number formatting

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf.data(), end);
}

double parse_double(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw InputError("expected a number");
  const std::string s = j.get<std::string>();
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InputError("invalid number '" + s + "'");
  return v;
}

// ---------------------------------------------------------------------------
// Specs

CompactSpec CompactSpec::graph_polydisc(const std::vector<cplx>& centers,
                                        const std::vector<double>& radii) {
  if (centers.size() != radii.size() || centers.empty())
    throw InputError("compact: centers and radii must match");
  CompactSpec k;
  k.kind = ProblemKind::Graph;
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const double r = radii[j];
    if (!(r >= 0.0) || !std::isfinite(r)) throw InputError("compact: radius must be >= 0");
    k.region.z.emplace_back(centers[j].real() - r, centers[j].real() + r);
    k.region.z.emplace_back(centers[j].imag() - r, centers[j].imag() + r);
    k.region.z_clip.push_back(r > 0.0 ? std::optional<Disc>(Disc{centers[j], r})
                                      : std::nullopt);
  }
  return k;
}

CompactSpec CompactSpec::graph_box(const ParamBox& z_box) {
  CompactSpec k;
  k.kind = ProblemKind::Graph;
  k.region = z_box;
  k.region.w.clear();
  k.region.w_clip.clear();
  k.validate();
  return k;
}

CompactSpec CompactSpec::submersion_cap(const std::vector<cplx>& centers,
                                        const std::vector<double>& radii) {
  for (double r : radii)
    if (!(r > 0.0) || !std::isfinite(r)) throw InputError("cap radius must be > 0");
  CompactSpec k = graph_polydisc(centers, radii);
  k.kind = ProblemKind::Submersion;
  return k;
}

void CompactSpec::validate() const {
  try {
    region.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("compact: ") + e.what());
  }
  if (region.has_w()) throw InputError("compact: region must not carry w intervals");
  if (region.excluded()) throw InputError("compact: region is empty");
  if (kind == ProblemKind::Submersion)
    for (const auto& d : region.z_clip)
      if (!d) throw InputError("compact: submersion caps must be polydiscs");
}

void OmegaSpec::validate(std::size_t expected) const {
  if (center.size() != expected || radius.size() != expected)
    throw InputError("omega: expected " + std::to_string(expected) + " coordinates");
  for (double r : radius)
    if (!(r > 0.0) || !std::isfinite(r)) throw InputError("omega: radii must be > 0");
  for (const cplx& c : center)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw InputError("omega: center must be finite");
}

namespace {

void check_kind(const ProblemSystem& sys, const CompactSpec& k) {
  if (sys.kind() != k.kind) throw InputError("compact kind does not match the system");
  if (k.n() != sys.n()) throw InputError("compact dimension does not match the system");
  k.validate();
}

// Closed disc around the region coordinate j.
Disc covering_disc(const ParamBox& region, std::size_t j) {
  if (j < region.z_clip.size() && region.z_clip[j]) {
    const Disc& d = *region.z_clip[j];
    const CInterval r{region.z[2 * j], region.z[2 * j + 1]};
    // The clipped rectangle may be smaller than the disc.
    return Disc{d.center, std::min(d.radius, r.max_distance(d.center))};
  }
  const CInterval r{region.z[2 * j], region.z[2 * j + 1]};
  return Disc{r.mid(), r.max_distance(r.mid())};
}

void enclosure_leaves(const ProblemSystem& sys, const ParamBox& box, int level,
                      std::vector<std::vector<CInterval>>& out) {
  if (box.excluded()) return;
  if (level == kEnclosureDepth) {
    std::vector<CInterval> f;
    for (int nu = 0; nu < sys.n(); ++nu) f.push_back(sys.value_poly(nu).eval(box.z));
    out.push_back(std::move(f));
    return;
  }
  const auto [lo, hi] = box.bisect(box.widest_axis());
  enclosure_leaves(sys, lo, level + 1, out);
  enclosure_leaves(sys, hi, level + 1, out);
}

}  // namespace

OmegaSpec suggest_omega(const ProblemSystem& sys, const CompactSpec& k,
                        double inflation) {
  if (!(inflation > 0.0) || !std::isfinite(inflation))
    throw InputError("inflation must be > 0");
  check_kind(sys, k);
  OmegaSpec o;
  for (std::size_t j = 0; j < static_cast<std::size_t>(k.n()); ++j) {
    const Disc d = covering_disc(k.region, j);
    o.center.push_back(d.center);
    o.radius.push_back(detail::widen_up(d.radius + inflation));
  }
  if (sys.kind() == ProblemKind::Submersion) return o;

  std::vector<std::vector<CInterval>> leaves;
  enclosure_leaves(sys, k.region, 0, leaves);
  for (int nu = 0; nu < sys.n(); ++nu) {
    const auto nu_s = static_cast<std::size_t>(nu);
    Interval re = leaves.front()[nu_s].re, im = leaves.front()[nu_s].im;
    for (const auto& l : leaves) {
      re = hull(re, l[nu_s].re);
      im = hull(im, l[nu_s].im);
    }
    const cplx c(re.mid(), im.mid());
    double r = 0.0;
    for (const auto& l : leaves) r = std::max(r, l[nu_s].max_distance(c));
    o.center.push_back(c);
    o.radius.push_back(detail::widen_up(r + inflation));
  }
  return o;
}

ParamBox omega_box(const ProblemSystem& sys, const OmegaSpec& omega) {
  const auto n = static_cast<std::size_t>(sys.n());
  omega.validate(sys.kind() == ProblemKind::Graph ? 2 * n : n);
  const std::vector<cplx> zc(omega.center.begin(), omega.center.begin() + n);
  const std::vector<double> zr(omega.radius.begin(), omega.radius.begin() + n);
  ParamBox box = ParamBox::polydisc(zc, zr);
  if (sys.kind() == ProblemKind::Graph) {
    for (std::size_t nu = 0; nu < n; ++nu) {
      const cplx c = omega.center[n + nu];
      const double r = omega.radius[n + nu];
      box.w.emplace_back(c.real() - r, c.real() + r);
      box.w.emplace_back(c.imag() - r, c.imag() + r);
      box.w_clip.push_back(Disc{c, r});
    }
  }
  return box;
}

// ---------------------------------------------------------------------------
// Certification

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

Verdict verdict_from_string(const std::string& s) {
  for (auto v : {Verdict::Pass, Verdict::Fail, Verdict::Inconclusive})
    if (to_string(v) == s) return v;
  throw InputError("unknown verdict: " + s);
}

std::string problem_hash(const ProblemSystem& sys) {
  std::ostringstream text;
  text << to_string(sys.kind()) << ";n=" << sys.n() << ";k=" << sys.k();
  for (const auto& f : sys.source()) text << ";" << to_string(f);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
  return buf.data();
}

namespace {

struct GraphInclusion {
  const ProblemSystem& sys;
  const OmegaSpec& omega;
  int max_depth;
  std::optional<Witness> witness;
  std::size_t leaves = 0;
  int depth_reached = 0;

  // PROVED when F(box) lies in ω_w; FAILED on a sample outside.
  VerifyStatus run(const ParamBox& box, int depth) {
    if (box.excluded()) return VerifyStatus::Excluded;
    const auto n = static_cast<std::size_t>(sys.n());
    bool inside = true;
    for (std::size_t nu = 0; nu < n && inside; ++nu) {
      const CInterval f = sys.value_poly(static_cast<int>(nu)).eval(box.z);
      inside = f.max_distance(omega.center[n + nu]) < omega.radius[n + nu];
    }
    if (inside) {
      ++leaves;
      depth_reached = std::max(depth_reached, depth);
      return VerifyStatus::Proved;
    }
    const auto z = box.sample_z();
    for (std::size_t nu = 0; nu < n; ++nu) {
      const cplx f = eval_point(sys.table(static_cast<int>(nu)).function(), z);
      const double dist = std::abs(f - omega.center[n + nu]);
      if (dist >= omega.radius[n + nu]) {
        Witness w;
        w.z = z;
        for (std::size_t m = 0; m < n; ++m)
          w.w.push_back(eval_point(sys.table(static_cast<int>(m)).function(), z));
        w.residual = dist;
        w.radius = omega.radius[n + nu];
        witness = w;
        ++leaves;
        return VerifyStatus::Failed;
      }
    }
    if (depth >= max_depth) {
      ++leaves;
      depth_reached = std::max(depth_reached, depth);
      return VerifyStatus::Inconclusive;
    }
    const auto [lo, hi] = box.bisect(box.widest_axis());
    const VerifyStatus a = run(lo, depth + 1);
    if (a == VerifyStatus::Failed) return a;
    const VerifyStatus b = run(hi, depth + 1);
    if (b == VerifyStatus::Failed) return b;
    if (a == VerifyStatus::Inconclusive || b == VerifyStatus::Inconclusive)
      return VerifyStatus::Inconclusive;
    if (a == VerifyStatus::Excluded && b == VerifyStatus::Excluded) return VerifyStatus::Excluded;
    return VerifyStatus::Proved;
  }
};

CheckReport check_k_in_omega(const ProblemSystem& sys, const CompactSpec& k,
                             const OmegaSpec& omega, int max_depth,
                             std::optional<Witness>& witness) {
  CheckReport rep;
  rep.report.m_lower = rep.report.big_l_upper = rep.report.residual_upper =
      rep.report.radius_lower = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t j = 0; j < static_cast<std::size_t>(k.n()); ++j) {
    const Disc d = covering_disc(k.region, j);
    const double reach = detail::widen_up(std::abs(d.center - omega.center[j]) + d.radius);
    if (!(reach < omega.radius[j])) {
      rep.status = VerifyStatus::Failed;
      rep.detail = "region coordinate z" + std::to_string(j + 1) +
                   " is not inside the omega polydisc";
      Witness w;
      w.z = k.region.sample_z();
      const cplx dir = d.center - omega.center[j];
      w.z[j] = d.center + (std::abs(dir) > 0 ? d.radius * dir / std::abs(dir) : cplx(d.radius));
      w.residual = std::abs(w.z[j] - omega.center[j]);
      w.radius = omega.radius[j];
      witness = w;
      return rep;
    }
  }
  if (sys.kind() == ProblemKind::Submersion) {
    rep.status = VerifyStatus::Proved;
    rep.detail = "cap inside omega";
    rep.report.leaf_count = 1;
    return rep;
  }
  GraphInclusion inc{sys, omega, max_depth, std::nullopt};
  rep.status = inc.run(k.region, 0);
  if (rep.status == VerifyStatus::Excluded) rep.status = VerifyStatus::Proved;
  rep.report.leaf_count = inc.leaves;
  rep.report.depth = inc.depth_reached;
  if (rep.status == VerifyStatus::Failed) {
    rep.detail = "F(region) leaves the omega polydisc";
    witness = inc.witness;
  } else if (rep.status == VerifyStatus::Proved) {
    rep.detail = "region and F(region) inside omega";
  } else {
    rep.detail = "depth exhausted enclosing F(region)";
  }
  return rep;
}

}  // namespace

Certificate certify(const ProblemSystem& sys, const CompactSpec& k,
                    const OmegaSpec& omega, const CertifyOptions& opts) {
  check_kind(sys, k);
  const ParamBox tube_box = omega_box(sys, omega);
  VerifyOptions vo;
  vo.max_depth = opts.max_depth;
  vo.margin = opts.margin;
  vo.threads = opts.threads;

  Certificate cert;
  cert.problem_hash = problem_hash(sys);
  cert.kind = sys.kind();
  cert.compact = k;
  cert.omega = omega;
  cert.max_depth = opts.max_depth;
  cert.margin = opts.margin;

  ParamBox z_only = tube_box;
  z_only.w.clear();
  z_only.w_clip.clear();
  const VerifyResult reality = verify_total_reality(sys, z_only, vo);
  cert.totally_real.status = reality.status;
  cert.totally_real.report = reality.report;
  cert.totally_real.detail = "sigma_min of the dbar matrix bounded away from 0 on omega_z";

  std::optional<Witness> inclusion_witness;
  cert.k_in_omega = check_k_in_omega(sys, k, omega, opts.max_depth, inclusion_witness);

  const VerifyResult tube = verify_box(sys, tube_box, vo);
  cert.omega_in_tube.status = tube.status;
  cert.omega_in_tube.report = tube.report;
  cert.omega_in_tube.detail = "residual below the tube radius on omega";
  cert.tube_tree = tube.tree;

  const std::array<std::pair<const char*, const CheckReport*>, 3> checks = {
      {{"totally_real", &cert.totally_real},
       {"k_in_omega", &cert.k_in_omega},
       {"omega_in_tube", &cert.omega_in_tube}}};
  bool all_proved = true;
  for (const auto& [name, rep] : checks) {
    all_proved &= rep->status == VerifyStatus::Proved;
    if (rep->status == VerifyStatus::Failed && cert.failed_check.empty()) {
      cert.failed_check = name;
      if (rep == &cert.totally_real) cert.witness = reality.witness;
      else if (rep == &cert.k_in_omega) cert.witness = inclusion_witness;
      else cert.witness = tube.witness;
    }
  }
  cert.verdict = all_proved                    ? Verdict::Pass
                 : !cert.failed_check.empty() ? Verdict::Fail
                                              : Verdict::Inconclusive;
  return cert;
}

bool replay(const ProblemSystem& sys, const Certificate& cert) {
  if (cert.verdict != Verdict::Pass) return false;
  if (cert.problem_hash != problem_hash(sys)) return false;
  return replay_tube_tree(sys, omega_box(sys, cert.omega), cert.tube_tree, cert.margin);
}

// ---------------------------------------------------------------------------
// JSON

Json to_json(const BoundReport& r) {
  return Json{{"m_lower", format_double(r.m_lower)},
              {"L_upper", format_double(r.big_l_upper)},
              {"residual_upper", format_double(r.residual_upper)},
              {"radius_lower", format_double(r.radius_lower)},
              {"depth", r.depth},
              {"leaf_count", r.leaf_count}};
}

namespace {

BoundReport bound_report_from_json(const Json& j) {
  BoundReport r;
  r.m_lower = parse_double(require(j, "m_lower"));
  r.big_l_upper = parse_double(require(j, "L_upper"));
  r.residual_upper = parse_double(require(j, "residual_upper"));
  r.radius_lower = parse_double(require(j, "radius_lower"));
  r.depth = parse_int(require(j, "depth"), "depth");
  r.leaf_count = require(j, "leaf_count").get<std::size_t>();
  return r;
}

Json tree_json(const VerifyNode& node) {
  Json j{{"status", to_string(node.status)}, {"report", to_json(node.report)}};
  if (!node.children.empty()) {
    j["split_axis"] = node.split_axis;
    j["children"] = Json::array({tree_json(node.children[0]), tree_json(node.children[1])});
  }
  return j;
}

VerifyNode tree_from_json(const Json& j) {
  VerifyNode node;
  node.status = verify_status_from_string(require(j, "status").get<std::string>());
  node.report = bound_report_from_json(require(j, "report"));
  if (j.contains("children")) {
    node.split_axis = parse_int(require(j, "split_axis"), "split_axis");
    const Json& c = j.at("children");
    if (!c.is_array() || c.size() != 2) throw InputError("tree node needs two children");
    node.children.push_back(tree_from_json(c[0]));
    node.children.push_back(tree_from_json(c[1]));
  }
  return node;
}

Json check_json(const CheckReport& c) {
  return Json{{"status", to_string(c.status)}, {"report", to_json(c.report)}, {"detail", c.detail}};
}

CheckReport check_from_json(const Json& j) {
  CheckReport c;
  c.status = verify_status_from_string(require(j, "status").get<std::string>());
  c.report = bound_report_from_json(require(j, "report"));
  c.detail = require(j, "detail").get<std::string>();
  return c;
}

Witness witness_from_json(const Json& j) {
  Witness w;
  w.z = parse_cplx_list(require(j, "z"), "witness z");
  w.w = parse_cplx_list(require(j, "w"), "witness w");
  w.residual = parse_double(require(j, "residual"));
  w.radius = parse_double(require(j, "radius"));
  return w;
}

}  // namespace

Json to_json(const Witness& w) {
  Json z = Json::array(), ww = Json::array();
  for (const cplx& c : w.z) z.push_back(cplx_json(c));
  for (const cplx& c : w.w) ww.push_back(cplx_json(c));
  return Json{{"z", z},
              {"w", ww},
              {"residual", format_double(w.residual)},
              {"radius", format_double(w.radius)}};
}

Json to_json(const CompactSpec& k) {
  Json intervals = Json::array(), discs = Json::array();
  for (const auto& iv : k.region.z)
    intervals.push_back(Json::array({format_double(iv.lo), format_double(iv.hi)}));
  for (std::size_t j = 0; j < static_cast<std::size_t>(k.n()); ++j) {
    if (j < k.region.z_clip.size() && k.region.z_clip[j])
      discs.push_back(Json{{"center", cplx_json(k.region.z_clip[j]->center)},
                           {"radius", format_double(k.region.z_clip[j]->radius)}});
    else
      discs.push_back(nullptr);
  }
  return Json{{"type", "region"}, {"intervals", intervals}, {"discs", discs}};
}

CompactSpec compact_from_json(const Json& j, ProblemKind kind, int n) {
  if (!j.is_object()) throw InputError("compact must be an object");
  const std::string type = require(j, "type").get<std::string>();
  CompactSpec k;
  if (type == "polydisc") {
    reject_unknown(j, {"type", "center", "radius"}, "compact");
    const auto c = parse_cplx_list(require(j, "center"), "compact center");
    const auto r = parse_double_list(require(j, "radius"), "compact radius");
    k = kind == ProblemKind::Graph ? CompactSpec::graph_polydisc(c, r)
                                   : CompactSpec::submersion_cap(c, r);
  } else if (type == "box") {
    reject_unknown(j, {"type", "re", "im"}, "compact");
    if (kind != ProblemKind::Graph) throw InputError("submersion compacts must be polydiscs");
    const Json& re = require(j, "re");
    const Json& im = require(j, "im");
    if (!re.is_array() || !im.is_array() || re.size() != im.size())
      throw InputError("compact box needs matching re and im interval lists");
    ParamBox b;
    for (std::size_t a = 0; a < re.size(); ++a) {
      for (const Json* part : {&re[a], &im[a]}) {
        if (!part->is_array() || part->size() != 2) throw InputError("interval must be [lo, hi]");
        b.z.emplace_back(parse_double((*part)[0]), parse_double((*part)[1]));
      }
    }
    k = CompactSpec::graph_box(b);
  } else if (type == "region") {
    reject_unknown(j, {"type", "intervals", "discs"}, "compact");
    k.kind = kind;
    for (const auto& iv : require(j, "intervals")) {
      if (!iv.is_array() || iv.size() != 2) throw InputError("interval must be [lo, hi]");
      k.region.z.emplace_back(parse_double(iv[0]), parse_double(iv[1]));
    }
    for (const auto& d : require(j, "discs")) {
      if (d.is_null()) k.region.z_clip.push_back(std::nullopt);
      else
        k.region.z_clip.push_back(
            Disc{parse_cplx(require(d, "center")), parse_double(require(d, "radius"))});
    }
    if (std::none_of(k.region.z_clip.begin(), k.region.z_clip.end(),
                     [](const auto& d) { return d.has_value(); }))
      k.region.z_clip.clear();
  } else {
    throw InputError("unknown compact type '" + type + "'");
  }
  k.kind = kind;
  if (k.n() != n) throw InputError("compact dimension does not match n");
  k.validate();
  return k;
}

Json to_json(const OmegaSpec& o) {
  Json c = Json::array(), r = Json::array();
  for (const cplx& z : o.center) c.push_back(cplx_json(z));
  for (double v : o.radius) r.push_back(format_double(v));
  return Json{{"center", c}, {"radius", r}};
}

OmegaSpec omega_from_json(const Json& j) {
  reject_unknown(j, {"center", "radius"}, "omega");
  OmegaSpec o;
  o.center = parse_cplx_list(require(j, "center"), "omega center");
  o.radius = parse_double_list(require(j, "radius"), "omega radius");
  return o;
}

Json to_json(const Certificate& cert) {
  Json j{{"verdict", to_string(cert.verdict)},
         {"problem_hash", cert.problem_hash},
         {"kind", to_string(cert.kind)},
         {"compact", to_json(cert.compact)},
         {"omega", to_json(cert.omega)},
         {"checks",
          Json{{"totally_real", check_json(cert.totally_real)},
               {"k_in_omega", check_json(cert.k_in_omega)},
               {"omega_in_tube", check_json(cert.omega_in_tube)}}},
         {"tube_tree", tree_json(cert.tube_tree)},
         {"options", Json{{"max_depth", cert.max_depth}, {"margin", format_double(cert.margin)}}},
         {"tolerances",
          Json{{"interval_inflation", format_double(cert.interval_inflation)},
               {"numerical_radius_tol", format_double(cert.numerical_radius_tol)},
               {"rounding", "relative outward widening per operation, no directed rounding"}}}};
  if (!cert.failed_check.empty()) j["failed_check"] = cert.failed_check;
  if (cert.witness) j["witness"] = to_json(*cert.witness);
  return j;
}

Certificate certificate_from_json(const Json& j) {
  try {
    Certificate c;
    c.verdict = verdict_from_string(require(j, "verdict").get<std::string>());
    c.problem_hash = require(j, "problem_hash").get<std::string>();
    const std::string kind = require(j, "kind").get<std::string>();
    if (kind != "graph" && kind != "submersion") throw InputError("unknown kind " + kind);
    c.kind = kind == "graph" ? ProblemKind::Graph : ProblemKind::Submersion;
    c.omega = omega_from_json(require(j, "omega"));
    const Json& compact = require(j, "compact");
    c.compact = compact_from_json(compact, c.kind,
                                  static_cast<int>(require(compact, "discs").size()));
    const Json& checks = require(j, "checks");
    c.totally_real = check_from_json(require(checks, "totally_real"));
    c.k_in_omega = check_from_json(require(checks, "k_in_omega"));
    c.omega_in_tube = check_from_json(require(checks, "omega_in_tube"));
    c.tube_tree = tree_from_json(require(j, "tube_tree"));
    const Json& opts = require(j, "options");
    c.max_depth = parse_int(require(opts, "max_depth"), "max_depth");
    c.margin = parse_double(require(opts, "margin"));
    const Json& tol = require(j, "tolerances");
    c.interval_inflation = parse_double(require(tol, "interval_inflation"));
    c.numerical_radius_tol = parse_double(require(tol, "numerical_radius_tol"));
    if (j.contains("failed_check")) c.failed_check = j.at("failed_check").get<std::string>();
    if (j.contains("witness")) c.witness = witness_from_json(j.at("witness"));
    return c;
  } catch (const Json::exception& e) {
    throw InputError(std::string("certificate: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("certificate: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Manifests

Manifest parse_manifest(const Json& j) {
  try {
    reject_unknown(j, {"kind", "n", "k", "functions", "compact", "omega", "options", "probe",
                       "name", "description"},
                   "manifest");
    const std::string kind = require(j, "kind").get<std::string>();
    if (kind != "graph" && kind != "submersion")
      throw InputError("kind must be 'graph' or 'submersion'");
    const int n = parse_int(require(j, "n"), "n");
    if (n < 1) throw InputError("n must be >= 1");
    const Json& fj = require(j, "functions");
    if (!fj.is_array()) throw InputError("functions must be an array of strings");
    std::vector<Expr> fs;
    for (const auto& f : fj) fs.push_back(parse(f.get<std::string>(), n));

    Manifest m;
    ProblemKind pk;
    if (kind == "graph") {
      if (j.contains("k")) throw InputError("'k' applies to submersion manifests only");
      m.system = ProblemSystem::graph(fs, n);
      pk = ProblemKind::Graph;
    } else {
      m.system = ProblemSystem::submersion(fs, n, parse_int(require(j, "k"), "k"));
      pk = ProblemKind::Submersion;
    }
    m.compact = compact_from_json(require(j, "compact"), pk, n);
    if (j.contains("omega")) {
      m.omega = omega_from_json(j.at("omega"));
      m.omega->validate(pk == ProblemKind::Graph ? 2 * static_cast<std::size_t>(n)
                                                 : static_cast<std::size_t>(n));
    }
    if (j.contains("options")) {
      const Json& o = j.at("options");
      reject_unknown(o, {"max_depth", "margin", "inflation", "threads", "degree", "density",
                         "angles", "seed"},
                     "options");
      auto& opt = m.options;
      if (o.contains("max_depth")) opt.max_depth = parse_int(o["max_depth"], "max_depth");
      if (o.contains("margin")) opt.margin = parse_double(o["margin"]);
      if (o.contains("inflation")) opt.inflation = parse_double(o["inflation"]);
      if (o.contains("threads")) opt.threads = parse_int(o["threads"], "threads");
      if (o.contains("degree")) opt.degree = parse_int(o["degree"], "degree");
      if (o.contains("density")) opt.density = parse_int(o["density"], "density");
      if (o.contains("angles")) opt.angles = parse_int(o["angles"], "angles");
      if (o.contains("seed")) {
        if (!o["seed"].is_number_integer() || o["seed"].get<std::int64_t>() < 0) throw InputError("seed must be a non-negative integer");
        opt.seed = o["seed"].get<std::uint64_t>();
      }
    }
    if (j.contains("probe")) {
      const Json& p = j.at("probe");
      reject_unknown(p, {"point"}, "probe");
      m.probe_point = parse_cplx_list(require(p, "point"), "probe point");
    }
    return m;
  } catch (const ParseError& e) {
    throw InputError(std::string("expression error at offset ") + std::to_string(e.position()) +
                     ": " + e.what());
  } catch (const Json::exception& e) {
    throw InputError(std::string("manifest: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("manifest: ") + e.what());
  }
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  return parse_manifest(j);
}

// ---------------------------------------------------------------------------
// Examples

ProblemSystem wermer_example() {
  return ProblemSystem::graph(
      {parse("-(1+i)*conj(z1) + i*z1*conj(z1)^2 + z1^2*conj(z1)^3", 1)}, 1);
}

ProblemSystem graph_over_r2_example(double c, double d) {
  const Expr x1 = Expr::re(Expr::var(0)), x2 = Expr::re(Expr::var(1));
  const Expr rho1 = Expr::sub(
      Expr::im(Expr::var(0)),
      Expr::mul(Expr::constant(c), Expr::add(Expr::pow(x1, 2), Expr::pow(x2, 3))));
  const Expr rho2 = Expr::sub(
      Expr::im(Expr::var(1)),
      Expr::mul(Expr::constant(d), Expr::add(Expr::pow(x2, 2), Expr::pow(x1, 3))));
  return ProblemSystem::submersion({rho1, rho2}, 2, 2);
}

namespace {

Json certificate_summary(const Certificate& c) {
  Json j{{"verdict", to_string(c.verdict)},
         {"problem_hash", c.problem_hash},
         {"omega", to_json(c.omega)},
         {"checks",
          Json{{"totally_real", check_json(c.totally_real)},
               {"k_in_omega", check_json(c.k_in_omega)},
               {"omega_in_tube", check_json(c.omega_in_tube)}}}};
  if (!c.failed_check.empty()) j["failed_check"] = c.failed_check;
  if (c.witness) j["witness"] = to_json(*c.witness);
  return j;
}

Json discrepancy(const std::string& quantity, double published, double computed,
                 const std::string& note) {
  const double rel = std::fabs(published - computed) / std::max(1.0, std::fabs(published));
  return Json{{"quantity", quantity},
              {"published", format_double(published)},
              {"computed", format_double(computed)},
              {"relative_difference", format_double(rel)},
              {"flagged", rel > 1e-3},
              {"note", note}};
}

CertifyOptions certify_options(const ReproduceParams& p) {
  return CertifyOptions{p.max_depth, p.margin, p.threads};
}

Certificate certify_wermer_disc(const ProblemSystem& sys, double r,
                                const ReproduceParams& p) {
  const CompactSpec k = CompactSpec::graph_polydisc({0.0}, {r});
  return certify(sys, k, suggest_omega(sys, k, p.inflation), certify_options(p));
}

Json reproduce_wermer(const ReproduceParams& p) {
  const ProblemSystem sys = wermer_example();
  auto h = [](double r) { return 9 * std::pow(r, 8) - 2 * std::pow(r, 4) - 4 * r * r + 2; };
  auto l = [](double r) { return 2 * r * std::sqrt(1 + 9 * std::pow(r, 4)); };

  Json report;
  report["example"] = "wermer";
  report["functions"] = Json::array({to_string(sys.source()[0])});

  const double r_published = 1.0 / std::sqrt(3.0);
  Json spots = Json::array();
  for (double r : {0.0, 0.3, r_published, 1.0}) {
    const cplx z[] = {r};
    spots.push_back(Json{{"r", format_double(r)},
                         {"m", format_double(m_value(sys, z))},
                         {"m_closed_form", format_double(h(r))},
                         {"L", format_double(big_l_value(sys, z))},
                         {"L_closed_form", format_double(l(r))},
                         {"radius", format_double(tube_radius(sys, z))}});
  }
  report["spot_checks"] = spots;

  // inf m and sup L over the closed disc |z| ≤ 1/√3: sampled on a polar
  // grid (both are radial) and enclosed rigorously by subdivision.
  double m_sampled = kInf, l_sampled = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const cplx z[] = {std::polar(r_published * i / 400.0, 0.3)};
    m_sampled = std::min(m_sampled, m_value(sys, z));
    l_sampled = std::max(l_sampled, big_l_value(sys, z));
  }
  const BoundReport rig = survey_bounds(sys, ParamBox::polydisc({0.0}, {r_published}), 10);
  report["disc_bounds"] = Json{{"radius", format_double(r_published)},
                               {"inf_m_sampled", format_double(m_sampled)},
                               {"inf_m_lower_bound", format_double(rig.m_lower)},
                               {"sup_L_sampled", format_double(l_sampled)},
                               {"sup_L_upper_bound", format_double(rig.big_l_upper)}};

  const double published_inf_m = 1.0;
  const double published_sup_l = 4.0 / (3.0 * std::pow(3.0, 0.25));
  report["published_constants"] =
      Json{{"inf_m", format_double(published_inf_m)},
           {"sup_L", format_double(published_sup_l)},
           {"certified_r_max", format_double(r_published)},
           {"w_radius", format_double(3.0 * std::pow(3.0, 0.25) / 4.0)}};

  const Certificate at_r = certify_wermer_disc(sys, p.r, p);
  const Certificate unit = certify_wermer_disc(sys, 1.0, p);
  report["certificate_r"] = Json{{"r", format_double(p.r)}, {"certificate", certificate_summary(at_r)}};
  report["certificate_unit_disc"] = certificate_summary(unit);

  // Largest r with a PASS, bisection to resolution 1e-3.
  double lo = 0.0, hi = 1.0;
  if (at_r.verdict == Verdict::Pass) lo = p.r;
  if (unit.verdict == Verdict::Pass) lo = hi = 1.0;
  int evaluations = 0;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    ++evaluations;
    if (certify_wermer_disc(sys, mid, p).verdict == Verdict::Pass) lo = mid;
    else hi = mid;
  }
  report["max_certifiable_r"] = Json{{"value", format_double(lo)},
                                     {"bracket", Json::array({format_double(lo), format_double(hi)})},
                                     {"resolution", format_double(1e-3)},
                                     {"inflation", format_double(p.inflation)},
                                     {"certify_runs", evaluations}};

  Json disc = Json::array();
  disc.push_back(discrepancy("inf m over |z| <= 1/sqrt(3)", published_inf_m, m_sampled,
                             "closed form 9r^8-2r^4-4r^2+2 at r=1/sqrt(3) equals 5/9"));
  disc.push_back(discrepancy("sup L over |z| <= 1/sqrt(3)", published_sup_l, l_sampled,
                             "closed form 2r sqrt(1+9r^4) at r=1/sqrt(3) equals 2sqrt(2)/sqrt(3)"));
  disc.push_back(discrepancy("largest certifiable r", r_published, lo,
                             "polydisc omega from suggest_omega, bisection over certify"));
  report["discrepancies"] = disc;
  report["options"] = Json{{"max_depth", p.max_depth},
                           {"margin", format_double(p.margin)},
                           {"inflation", format_double(p.inflation)}};
  return report;
}

Json reproduce_graph_over_r2(const ReproduceParams& p) {
  if (!(p.c >= 0 && p.c <= 0.05 && p.d >= 0 && p.d <= 0.05))
    throw InputError("graph_over_r2 needs 0 <= c, d <= 1/20");
  if (!(p.epsilon > 0 && p.epsilon < 0.05)) throw InputError("epsilon must lie in (0, 1/20)");
  const ProblemSystem sys = graph_over_r2_example(p.c, p.d);
  Json report;
  report["example"] = "graph_over_r2";
  report["functions"] = Json::array({to_string(sys.source()[0]), to_string(sys.source()[1])});
  report["parameters"] = Json{{"c", format_double(p.c)},
                              {"d", format_double(p.d)},
                              {"cap_radius", "1"},
                              {"epsilon", format_double(p.epsilon)}};

  const cplx origin[] = {0.0, 0.0};
  const CMatrix b0 = bbar_matrix(sys, origin);
  report["spot_checks"] = Json{{"dbar_rho1_z1_at_0", cplx_json(b0(0, 0))},
                               {"dbar_rho2_z2_at_0", cplx_json(b0(1, 1))},
                               {"published_value", cplx_json(cplx(0, 0.5))}};

  // m and L depend only on (x1, x2); sample the unit square.
  double m_min = kInf, l_max = 0.0;
  cplx m_arg{};
  for (int a = 0; a <= 200; ++a)
    for (int b = 0; b <= 200; ++b) {
      const cplx z[] = {-1.0 + a / 100.0, -1.0 + b / 100.0};
      const double m = m_value(sys, z);
      if (m < m_min) {
        m_min = m;
        m_arg = cplx(z[0].real(), z[1].real());
      }
      l_max = std::max(l_max, big_l_value(sys, z));
    }
  ParamBox unit;
  unit.z.assign(4, Interval(-1.0, 1.0));
  const BoundReport coarse = survey_bounds(sys, unit, 3);
  const BoundReport fine = survey_bounds(sys, unit, 10);
  report["unit_box_bounds"] = Json{{"survey_depth_3", to_json(coarse)},
                                   {"survey_depth_10", to_json(fine)},
                                   {"inf_m_sampled", format_double(m_min)},
                                   {"inf_m_sampled_at_x", cplx_json(m_arg)},
                                   {"sup_L_sampled", format_double(l_max)}};

  const double cd = std::max(p.c, p.d);
  const double published_radius = cd > 0 ? 1.0 / (8.0 * cd) : kInf;
  report["published_constants"] = Json{{"m_lower", "0.25"},
                                   {"L_upper", format_double(2 * cd)},
                                   {"tube_radius", format_double(published_radius)}};
  report["tube_radius_check"] =
      Json{{"rigorous_radius_lower", format_double(fine.radius_lower)},
           {"published_radius", format_double(published_radius)},
           {"contains_published_tube", fine.radius_lower >= published_radius}};

  const CompactSpec k = CompactSpec::submersion_cap({0.0, 0.0}, {1.0, 1.0});
  const Certificate cert = certify(sys, k, suggest_omega(sys, k, p.epsilon), certify_options(p));
  report["certificate"] = certificate_summary(cert);

  Json disc = Json::array();
  Json md = discrepancy("inf m over the unit square", 0.25, m_min,
                        "published bound m >= 1/4; the cross term of B*B lowers the minimum");
  md["flagged"] = m_min < 0.25 - 1e-9;
  disc.push_back(md);
  Json ld = discrepancy("sup L over the unit square", 2 * cd, l_max,
                        "published value is an upper bound; flagged only if exceeded");
  ld["flagged"] = l_max > 2 * cd + 1e-12;
  disc.push_back(ld);
  report["discrepancies"] = disc;
  report["options"] = Json{{"max_depth", p.max_depth}, {"margin", format_double(p.margin)}};
  return report;
}

}  // namespace

Json reproduce_example(const std::string& name, const ReproduceParams& params) {
  if (name == "wermer") return reproduce_wermer(params);
  if (name == "graph_over_r2") return reproduce_graph_over_r2(params);
  throw InputError("unknown example '" + name + "' (expected wermer or graph_over_r2)");
}

}  // namespace prc
