#include "prc/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "prc/certify.hpp"
#include "prc/hullprobe.hpp"

namespace prc {

namespace {

std::shared_ptr<spdlog::logger> logger() {
  if (auto l = spdlog::get("prc")) return l;
  auto l = spdlog::stderr_color_mt("prc");
  l->set_pattern("[%l] %v");
  return l;
}

void configure_logging(std::ostream& err) {
  auto log = logger();
  const char* env = std::getenv("PRC_LOG");
  const std::string level = env ? env : "warn";
  if (level == "error") log->set_level(spdlog::level::err);
  else if (level == "warn") log->set_level(spdlog::level::warn);
  else if (level == "info") log->set_level(spdlog::level::info);
  else if (level == "debug") log->set_level(spdlog::level::debug);
  else {
    log->set_level(spdlog::level::warn);
    err << "warning: ignoring PRC_LOG=" << level << " (expected error, warn, info or debug)\n";
  }
}

struct Overrides {
  std::optional<int> max_depth;
  std::optional<double> margin;
  std::optional<double> inflation;
  std::optional<int> degree;
  std::optional<int> density;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::string out;

  void apply(ManifestOptions& o) const {
    if (max_depth) o.max_depth = *max_depth;
    if (margin) o.margin = *margin;
    if (inflation) o.inflation = *inflation;
    if (degree) o.degree = *degree;
    if (density) o.density = *density;
    if (threads) o.threads = *threads;
    if (seed) o.seed = *seed;
  }
};

void validate(const ManifestOptions& o) {
  if (o.max_depth < 0 || o.max_depth > 40) throw InputError("max_depth must lie in [0, 40]");
  if (!(o.margin >= 0.0 && o.margin < 1.0)) throw InputError("margin must lie in [0, 1)");
  if (!(o.inflation > 0.0) || !std::isfinite(o.inflation)) throw InputError("inflation must be > 0");
  if (o.degree < 1 || o.degree > 12) throw InputError("degree must lie in [1, 12]");
  if (o.density < 2) throw InputError("density must be >= 2");
  if (o.threads < 0) throw InputError("threads must be >= 0");
  if (o.angles < 8) throw InputError("angles must be >= 8");
}

void add_common(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--out", ov.out, "Write the result to this file instead of stdout");
  cmd->add_option("--max-depth", ov.max_depth, "Maximum subdivision depth");
  cmd->add_option("--margin", ov.margin, "Relative safety margin of the tube test");
  cmd->add_option("--inflation", ov.inflation, "Inflation used to suggest omega");
  cmd->add_option("--degree", ov.degree, "Polynomial degree of the hull probe");
  cmd->add_option("--density", ov.density, "Sampling density per real dimension");
  cmd->add_option("--threads", ov.threads, "Worker threads (0: all cores)");
  cmd->add_option("--seed", ov.seed, "Sampling seed");
}

Json cplx_json(cplx c) { return Json::array({format_double(c.real()), format_double(c.imag())}); }

Json point_json(std::span<const cplx> z) {
  Json j = Json::array();
  for (const cplx& c : z) j.push_back(cplx_json(c));
  return j;
}

// "re,im;re,im;..."
std::vector<cplx> parse_point(const std::string& text) {
  std::vector<cplx> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ';')) {
    const auto comma = part.find(',');
    try {
      std::size_t used = 0;
      const double re = std::stod(part.substr(0, comma), &used);
      double im = 0.0;
      if (comma != std::string::npos) im = std::stod(part.substr(comma + 1));
      out.emplace_back(re, im);
    } catch (const std::exception&) {
      throw InputError("cannot parse point coordinate '" + part + "'");
    }
  }
  if (out.empty()) throw InputError("empty point");
  return out;
}

struct Output {
  std::string text;
  int code = kExitOk;
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

struct RealityArgs {
  std::string manifest;
  int grid = 41;
  std::optional<double> extent;
};

Output cmd_totally_real(const RealityArgs& a, const ManifestOptions& opts, const Manifest& m) {
  const ProblemSystem& sys = *m.system;
  Json points = Json::array();
  bool all = true;
  double min_sigma = std::numeric_limits<double>::infinity();
  Json witness;
  // Witness: smallest σ_min, ties broken towards the region center.
  std::vector<cplx> center;
  for (std::size_t j = 0; 2 * j < m.compact.region.z.size(); ++j)
    center.emplace_back(m.compact.region.z[2 * j].mid(), m.compact.region.z[2 * j + 1].mid());
  double witness_sigma = std::numeric_limits<double>::infinity();
  double witness_dist = std::numeric_limits<double>::infinity();
  auto consider = [&](std::span<const cplx> z, double sigma, const Json& entry) {
    double dist = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) dist += std::norm(z[j] - center[j]);
    if (sigma < witness_sigma || (sigma == witness_sigma && dist < witness_dist)) {
      witness_sigma = sigma;
      witness_dist = dist;
      witness = entry;
    }
  };

  if (sys.kind() == ProblemKind::Graph) {
    if (a.grid < 2) throw InputError("grid must be >= 2");
    CompactSpec k = m.compact;
    if (a.extent) {
      if (!(*a.extent > 0)) throw InputError("extent must be > 0");
      ParamBox square;
      square.z.assign(k.region.z.size(), Interval(-*a.extent, *a.extent));
      k = CompactSpec::graph_box(square);
    }
    const SampleCloud cloud = sample_compact(sys, k, a.grid, opts.seed);
    const auto n = static_cast<std::size_t>(sys.n());
    for (const auto& p : cloud.points) {
      const std::span<const cplx> z(p.data(), n);
      const auto rep = is_totally_real_graph(sys, z);
      points.push_back(Json{{"z", point_json(z)},
                            {"sigma_min", format_double(rep.sigma_min)},
                            {"totally_real", rep.totally_real}});
      min_sigma = std::min(min_sigma, rep.sigma_min);
      if (!rep.totally_real) {
        all = false;
        Json w{{"z", point_json(z)}, {"sigma_min", format_double(rep.sigma_min)}};
        if (rep.witness_v) {
          Json v = Json::array();
          for (Eigen::Index j = 0; j < rep.witness_v->size(); ++j) v.push_back(cplx_json((*rep.witness_v)(j)));
          w["complex_tangent"] = v;
        }
        consider(z, rep.sigma_min, w);
      }
    }
  } else {
    const SampleCloud cloud = sample_compact(sys, m.compact, opts.density, opts.seed);
    for (const auto& z : cloud.points) {
      Json entry{{"z", point_json(z)}};
      bool ok = false;
      double sigma = 0.0;
      try {
        const auto rep = is_totally_real_submersion(sys, z);
        ok = rep.totally_real;
        entry["sigma_min"] = format_double(rep.sigma_min);
        entry["rank"] = rep.rank;
        sigma = rep.sigma_min;
        min_sigma = std::min(min_sigma, rep.sigma_min);
      } catch (const NotSubmersion& e) {
        entry["not_submersion"] = e.what();
        min_sigma = 0.0;
      }
      entry["totally_real"] = ok;
      if (!ok) {
        all = false;
        consider(z, sigma, entry);
      }
      points.push_back(std::move(entry));
    }
  }
  Json report{{"kind", to_string(sys.kind())},
              {"points", points.size()},
              {"totally_real", all},
              {"min_sigma_min", format_double(min_sigma)},
              {"samples", points}};
  if (!all) report["witness"] = witness;
  logger()->info("totally-real: {} points, all totally real: {}", points.size(), all);
  return {dump(report), all ? kExitOk : kExitFail};
}

struct ProfileArgs {
  std::string manifest;
  double start = 0.0, stop = 1.0, step = 0.01, angle = 0.0;
  int axis = 1;
};

Output cmd_tube_profile(const ProfileArgs& a, const Manifest& m) {
  const ProblemSystem& sys = *m.system;
  if (!(a.step > 0) || !(a.stop >= a.start)) throw InputError("need step > 0 and stop >= start");
  if (a.axis < 1 || a.axis > sys.n()) throw InputError("axis out of range");
  const auto count = static_cast<long>(std::floor((a.stop - a.start) / a.step + 1e-9)) + 1;
  if (count > 1000000) throw InputError("ray has too many samples");
  std::vector<cplx> base;
  for (int j = 0; j < sys.n(); ++j) {
    const auto& re = m.compact.region.z[static_cast<std::size_t>(2 * j)];
    const auto& im = m.compact.region.z[static_cast<std::size_t>(2 * j + 1)];
    base.emplace_back(re.mid(), im.mid());
  }
  std::vector<double> ts;
  std::vector<std::vector<cplx>> pts;
  const cplx dir = std::polar(1.0, a.angle);
  for (long i = 0; i < count; ++i) {
    const double t = a.start + static_cast<double>(i) * a.step;
    auto z = base;
    z[static_cast<std::size_t>(a.axis - 1)] += t * dir;
    ts.push_back(t);
    pts.push_back(std::move(z));
  }
  const TubeProfile prof = tube_profile(sys, pts);
  std::ostringstream csv;
  csv << "t";
  for (int j = 1; j <= sys.n(); ++j) csv << ",re_z" << j << ",im_z" << j;
  csv << ",m,L,radius\n";
  for (std::size_t i = 0; i < prof.size(); ++i) {
    csv << format_double(ts[i]);
    for (const cplx& c : prof[i].z) csv << ',' << format_double(c.real()) << ',' << format_double(c.imag());
    csv << ',' << format_double(prof[i].m) << ',' << format_double(prof[i].big_l) << ','
        << format_double(prof[i].radius) << '\n';
  }
  return {csv.str(), kExitOk};
}

Output cmd_certify(const ManifestOptions& opts, const Manifest& m) {
  const ProblemSystem& sys = *m.system;
  const OmegaSpec omega = m.omega ? *m.omega : suggest_omega(sys, m.compact, opts.inflation);
  const Certificate cert = certify(sys, m.compact, omega, {opts.max_depth, opts.margin, opts.threads});
  logger()->info("certify: {} (tube leaves {})", to_string(cert.verdict),
                 cert.omega_in_tube.report.leaf_count);
  if (cert.verdict == Verdict::Fail) logger()->warn("certify failed in check {}", cert.failed_check);
  const int code = cert.verdict == Verdict::Pass   ? kExitOk
                   : cert.verdict == Verdict::Fail ? kExitFail
                                                   : kExitInconclusive;
  return {dump(to_json(cert)), code};
}

struct ProbeArgs {
  std::string manifest;
  std::string point;
  std::optional<int> angles;
};

Output cmd_hull_probe(const ProbeArgs& a, const ManifestOptions& opts, const Manifest& m) {
  const ProblemSystem& sys = *m.system;
  std::vector<cplx> q;
  if (!a.point.empty()) q = parse_point(a.point);
  else if (m.probe_point) q = *m.probe_point;
  else throw InputError("no probe point: pass --point or set probe.point in the manifest");
  const std::size_t ambient = sys.kind() == ProblemKind::Graph ? 2 * static_cast<std::size_t>(sys.n())
                                                               : static_cast<std::size_t>(sys.n());
  if (q.size() != ambient)
    throw InputError("probe point needs " + std::to_string(ambient) + " coordinates");

  const SampleCloud cloud = sample_compact(sys, m.compact, opts.density, opts.seed);
  ProbeOptions po{opts.degree, a.angles.value_or(opts.angles), 0.05};
  if (po.angles < 8) throw InputError("angles must be >= 8");
  SeparationResult res = probe(cloud, q, po);

  // Ten times as many points: scale the per-axis density accordingly.
  int dims = sys.kind() == ProblemKind::Submersion ? sys.k() : 0;
  if (sys.kind() == ProblemKind::Graph)
    for (const auto& iv : m.compact.region.z) dims += iv.hi > iv.lo;
  std::size_t dense_size = 0;
  if (res.separated && dims > 0) {
    const int dense_density =
        static_cast<int>(std::ceil(opts.density * std::pow(10.0, 1.0 / dims)));
    const SampleCloud dense = sample_compact(sys, m.compact, dense_density, opts.seed + 1);
    dense_size = dense.points.size();
    check_fragility(res, dense, q);
  }
  logger()->info("hull-probe: separated {} ratio {}", res.separated, res.ratio);
  Json report{{"hull_probe", to_json(res)},
              {"point", point_json(q)},
              {"cloud",
               Json{{"size", cloud.points.size()},
                    {"density", cloud.density},
                    {"seed", cloud.seed},
                    {"dense_size", dense_size}}}};
  return {dump(report), kExitOk};
}

struct ReproduceArgs {
  std::string name;
  std::optional<double> r, c, d, epsilon;
};

Output cmd_reproduce(const ReproduceArgs& a, const Overrides& ov) {
  ReproduceParams p;
  if (a.r) p.r = *a.r;
  if (a.c) p.c = *a.c;
  if (a.d) p.d = *a.d;
  if (a.epsilon) p.epsilon = *a.epsilon;
  ManifestOptions o;
  o.inflation = p.inflation;
  ov.apply(o);
  validate(o);
  p.inflation = o.inflation;
  p.max_depth = o.max_depth;
  p.margin = o.margin;
  p.threads = o.threads;
  if (!(p.r > 0 && p.r <= 1)) throw InputError("r must lie in (0, 1]");
  Json report;
  if (a.name == "all") {
    report["wermer"] = reproduce_example("wermer", p);
    report["graph_over_r2"] = reproduce_example("graph_over_r2", p);
  } else {
    report = reproduce_example(a.name, p);
  }
  return {dump(report), kExitOk};
}

int finish(const Output& o, const Overrides& ov, std::ostream& out, std::ostream& err) {
  if (ov.out.empty()) {
    out << o.text;
    return o.code;
  }
  std::ofstream f(ov.out, std::ios::binary);
  if (!f) {
    err << "error: cannot write '" << ov.out << "'\n";
    return kExitInputError;
  }
  f << o.text;
  return o.code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging(err);
  CLI::App app{"Polynomial convexity certificates for totally-real submanifolds", "prc"};
  app.require_subcommand(1);

  Overrides ov;
  RealityArgs ra;
  auto* tr = app.add_subcommand("totally-real", "Check total reality on a grid");
  tr->add_option("manifest", ra.manifest, "Problem manifest (JSON)")->required();
  tr->add_option("--grid", ra.grid, "Grid points per real axis");
  tr->add_option("--extent", ra.extent, "Use the square [-E, E] per real axis instead of the compact");
  add_common(tr, ov);

  ProfileArgs pa;
  auto* tp = app.add_subcommand("tube-profile", "CSV of m, L and the tube radius along a ray");
  tp->add_option("manifest", pa.manifest, "Problem manifest (JSON)")->required();
  tp->add_option("--start", pa.start, "Ray parameter start");
  tp->add_option("--stop", pa.stop, "Ray parameter end");
  tp->add_option("--step", pa.step, "Ray parameter step");
  tp->add_option("--angle", pa.angle, "Ray direction angle in the chosen coordinate");
  tp->add_option("--axis", pa.axis, "Complex coordinate moved along the ray (1-based)");
  add_common(tp, ov);

  std::string cert_manifest;
  auto* ce = app.add_subcommand("certify", "Certify K inside omega inside the tube");
  ce->add_option("manifest", cert_manifest, "Problem manifest (JSON)")->required();
  add_common(ce, ov);

  ProbeArgs pr;
  auto* hp = app.add_subcommand("hull-probe", "Polynomial separation evidence for a point");
  hp->add_option("manifest", pr.manifest, "Problem manifest (JSON)")->required();
  hp->add_option("--point", pr.point, "Ambient point as re,im;re,im;...");
  hp->add_option("--angles", pr.angles, "Polygon size of the modulus relaxation");
  add_common(hp, ov);

  ReproduceArgs rp;
  auto* re = app.add_subcommand("reproduce", "Reproduce the worked examples");
  re->add_option("name", rp.name, "wermer, graph_over_r2 or all")
      ->required()
      ->check(CLI::IsMember({"wermer", "graph_over_r2", "all"}));
  re->add_option("--r", rp.r, "Disc radius certified in the wermer example");
  re->add_option("--c", rp.c, "Coefficient c of graph_over_r2");
  re->add_option("--d", rp.d, "Coefficient d of graph_over_r2");
  re->add_option("--epsilon", rp.epsilon, "Cap inflation of graph_over_r2");
  add_common(re, ov);

  std::vector<std::string> argv_store{"prc"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  try {
    if (*re) return finish(cmd_reproduce(rp, ov), ov, out, err);

    const std::string& path = *tr ? ra.manifest : *tp ? pa.manifest : *ce ? cert_manifest : pr.manifest;
    Manifest m = load_manifest(path);
    ov.apply(m.options);
    validate(m.options);
    logger()->debug("manifest {}: {} system, n = {}", path, to_string(m.system->kind()), m.system->n());
    if (*tr) return finish(cmd_totally_real(ra, m.options, m), ov, out, err);
    if (*tp) return finish(cmd_tube_profile(pa, m), ov, out, err);
    if (*ce) return finish(cmd_certify(m.options, m), ov, out, err);
    return finish(cmd_hull_probe(pr, m.options, m), ov, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const SamplingError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace prc
