#ifndef PRC_CERTIFY_HPP
#define PRC_CERTIFY_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "prc/rigor.hpp"
#include "prc/trgeom.hpp"

namespace prc {

using Json = nlohmann::json;

/// Malformed manifest, certificate or spec input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The compact set K.
///
/// Graph kind: K is the graph of F over the parameter region `region`
/// (a z-box; coordinates with a clip disc are discs). Submersion kind:
/// K = M ∩ cap with `region` the closed polydisc cap.
struct CompactSpec {
  ProblemKind kind = ProblemKind::Graph;
  ParamBox region;

  /// Polydisc region; a zero radius gives a degenerate (point) coordinate.
  static CompactSpec graph_polydisc(const std::vector<cplx>& centers,
                                    const std::vector<double>& radii);
  static CompactSpec graph_box(const ParamBox& z_box);
  static CompactSpec submersion_cap(const std::vector<cplx>& centers,
                                    const std::vector<double>& radii);

  int n() const { return region.n(); }
  void validate() const;
};

/// Open polydisc ω. Graph kind: n z-coordinates followed by n w-coordinates.
struct OmegaSpec {
  std::vector<cplx> center;
  std::vector<double> radius;

  void validate(std::size_t expected) const;
  bool operator==(const OmegaSpec&) const = default;
};

OmegaSpec suggest_omega(const ProblemSystem& sys, const CompactSpec& k,
                        double inflation);

struct CertifyOptions {
  int max_depth = 14;
  double margin = 1e-6;
  int threads = 0;  // not recorded in certificates; output is independent of it
};

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct CheckReport {
  VerifyStatus status = VerifyStatus::Inconclusive;
  BoundReport report;
  std::string detail;
};

struct Certificate {
  Verdict verdict = Verdict::Inconclusive;
  std::string problem_hash;
  ProblemKind kind = ProblemKind::Graph;
  CompactSpec compact;
  OmegaSpec omega;
  CheckReport totally_real;
  CheckReport k_in_omega;
  CheckReport omega_in_tube;
  VerifyNode tube_tree;
  int max_depth = 14;
  double margin = 1e-6;
  double interval_inflation = kIntervalInflation;
  double numerical_radius_tol = kNumericalRadiusTol;
  std::string failed_check;  // empty unless FAIL
  std::optional<Witness> witness;
};

/// 16 hex digits of FNV-1a over the canonical problem text.
std::string problem_hash(const ProblemSystem& sys);

/// Checks total reality on ω_z, K ⊂ ω, and ω ⊂ tube. Throws InputError on
/// kind or dimension mismatches.
Certificate certify(const ProblemSystem& sys, const CompactSpec& k,
                    const OmegaSpec& omega, const CertifyOptions& opts = {});

/// The root box of the ω ⊂ tube check (ω's bounding box with clip discs).
ParamBox omega_box(const ProblemSystem& sys, const OmegaSpec& omega);

/// Re-walks the recorded tube tree against fresh bounds. False when the
/// hash does not match, the verdict is not PASS, or any leaf fails.
bool replay(const ProblemSystem& sys, const Certificate& cert);

Json to_json(const Certificate& cert);
Certificate certificate_from_json(const Json& j);

Json to_json(const CompactSpec& k);
CompactSpec compact_from_json(const Json& j, ProblemKind kind, int n);
Json to_json(const OmegaSpec& o);
OmegaSpec omega_from_json(const Json& j);
Json to_json(const BoundReport& r);
Json to_json(const Witness& w);

/// Shortest round-trip decimal; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);
/// Accepts JSON numbers and strings produced by format_double.
double parse_double(const Json& j);

struct ManifestOptions {
  int max_depth = 14;
  double margin = 1e-6;
  double inflation = 0.05;
  int threads = 0;
  int degree = 6;
  int density = 40;
  int angles = 16;
  std::uint64_t seed = 1;
};

struct Manifest {
  std::optional<ProblemSystem> system;
  CompactSpec compact;
  std::optional<OmegaSpec> omega;
  ManifestOptions options;
  std::optional<std::vector<cplx>> probe_point;
};

/// Throws InputError (including expression parse errors) on invalid input.
Manifest parse_manifest(const Json& j);
Manifest load_manifest(const std::string& path);

struct ReproduceParams {
  double r = 0.3;             // wermer: disc radius certified
  double inflation = 0.05;    // wermer
  double c = 0.05, d = 0.05;  // graph_over_r2
  double epsilon = 0.04;      // graph_over_r2
  int max_depth = 14;
  double margin = 1e-6;
  int threads = 0;
};

/// Report for "wermer" or "graph_over_r2"; throws InputError otherwise.
Json reproduce_example(const std::string& name, const ReproduceParams& params = {});

/// The Wermer example graph f(z) = −(1+i)z̄ + i z z̄² + z² z̄³.
ProblemSystem wermer_example();
/// ρ1 = y1 − c(x1² + x2³), ρ2 = y2 − d(x2² + x1³).
ProblemSystem graph_over_r2_example(double c, double d);

}  // namespace prc

#endif  // PRC_CERTIFY_HPP
