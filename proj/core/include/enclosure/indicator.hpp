#pragma once

#include "enclosure/geometry.hpp"
#include "enclosure/materials.hpp"
#include "enclosure/mesh.hpp"
#include "enclosure/solver.hpp"

#include <optional>
#include <span>
#include <vector>

namespace enclosure {

/// Probes are refused when tau * h_max exceeds this value.
inline constexpr double kResolutionGate = 0.5;

/// |J| below this is reported as underflow.
inline constexpr double kIndicatorFloor = 1e-300;

/// Exponential harmonic probe exp(tau x.(theta + i theta_perp)), normalised by
/// exp(-tau s) with s = sup over the domain of x.theta so that its modulus is
/// at most one on the boundary.
struct Probe {
  DirectionFrame frame;
  double tau;
  double shift;
};

/// shift = support function of the domain along frame.theta(). tau must be > 0.
Probe make_probe(const Domain& domain, const DirectionFrame& frame, double tau);

/// Largest tau passing the resolution gate on this mesh.
double max_admissible_tau(const Mesh& mesh);

/// exp(tau (x.theta - s)) * exp(i tau x.theta_perp).
Complex probe_value(const Probe& probe, const Vec2& x);

/// Probe values on mesh.boundary_vertices. Throws ProbeUnderresolved when
/// tau * h_max > kResolutionGate.
std::vector<Complex> cgo_trace(const Mesh& mesh, const Probe& probe);

struct IndicatorSample {
  double tau = 0.0;
  double log_abs_I = 0.0;  // log|I(tau, t)|; finite even on underflow
  int sign = 1;
  bool underflow = false;
};

struct IndicatorCurve {
  DirectionFrame frame{Vec2(1.0, 0.0)};
  double t = 0.0;
  std::vector<IndicatorSample> samples;
};

/// Re-expresses a curve at another t through
/// log|I(tau, t2)| = log|I(tau, t1)| - 2 tau (t2 - t1).
IndicatorCurve shift_curve(const IndicatorCurve& curve, double t);

/// Factorized problem for one mesh and scene. The DtN difference is evaluated
/// in contrast form: the background field is the probe itself and only the
/// scattered field is solved for, with zero boundary data. Every probe reuses
/// the factorization. Const member functions may be called from several
/// threads.
class IndicatorEngine {
public:
  /// Works directly with the reduced coefficient sigma~ - i omega eps~.
  IndicatorEngine(const Mesh& mesh, const Domain& domain, const ReducedScene& scene);

  /// Works with the original coefficient sigma - i omega eps and rescales the
  /// DtN difference by 1/(sigma0 - i omega eps0).
  static IndicatorEngine from_original(const Mesh& mesh, const Domain& domain,
                                       const MaterialScene& scene);

  /// (Lambda - Lambda_0) pairing of the shifted probe trace with its conjugate,
  /// in reduced normalisation (before taking the real part).
  Complex shifted_pairing(const Probe& probe) const;

  IndicatorSample indicator(const Probe& probe, double t) const;

  /// taus must be strictly increasing and pass the resolution gate.
  IndicatorCurve curve(const DirectionFrame& frame, std::span<const double> taus,
                       double t) const;

  const Mesh& mesh() const { return *mesh_; }
  const Domain& domain() const { return domain_; }
  bool has_contrast() const { return !contrast_.empty(); }

private:
  IndicatorEngine(const Mesh& mesh, const Domain& domain, CoeffField coeff, Complex c0,
                  Complex rescale);

  std::vector<Complex> pairings(const DirectionFrame& frame, std::span<const double> taus) const;

  const Mesh* mesh_;
  Domain domain_;
  Complex c0_;
  Complex rescale_;
  DirichletSystem system_;
  std::vector<ElementGeometry> geom_;
  std::vector<int> contrast_;
};

/// Single-probe convenience: factorizes, evaluates, discards.
IndicatorSample indicator(const ReducedScene& scene, const Mesh& mesh, const Domain& domain,
                          const Probe& probe, double t);

struct SupportEstimate {
  DirectionFrame frame{Vec2(1.0, 0.0)};
  double h_hat = 0.0;
  double fit_residual = 0.0;  // RMS deviation from the fitted line
  double tau_lo = 0.0;
  double tau_hi = 0.0;
  std::size_t n_fit = 0;
  std::optional<double> h_exact;
};

/// Least-squares slope of log|I(tau, 0)| against 2 tau over the upper half of
/// the tau range. Requires t = 0, at least 8 samples, at least 4 in the fit
/// window and no underflow inside it; throws Estimation otherwise.
SupportEstimate estimate_support(const IndicatorCurve& curve);

/// n uniformly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

struct SweepOptions {
  int n_directions = 16;
  std::vector<double> taus;
  double delta = 0.0;    // <= 0 selects the default slab depth
  unsigned threads = 0;  // 0: ENCLOSURE_KIT_THREADS or hardware concurrency
};

struct DirectionResult {
  int index = 0;
  DirectionFrame frame{Vec2(1.0, 0.0)};
  IndicatorCurve curve;
  std::optional<SupportEstimate> estimate;
  std::optional<RegimeReport> regime;

  /// True when no sufficient condition covers this direction.
  bool outside_proven_regime() const { return regime && !regime->proven(); }
};

struct SweepResult {
  std::vector<DirectionResult> directions;
  bool detected = false;
  std::optional<ConvexPolygon> hull;
};

/// Direction k is (cos 2 pi k / n, sin 2 pi k / n). Directions are evaluated
/// in parallel and aggregated in index order. Throws InvalidParameter for
/// fewer than 8 directions; estimation and hull errors propagate.
SweepResult sweep(const MaterialScene& scene, const Domain& domain, const Mesh& mesh,
                  const SweepOptions& options);

/// Same, reusing an engine built for the scene.
SweepResult sweep(const MaterialScene& scene, const IndicatorEngine& engine,
                  const SweepOptions& options);

/// Worker count: ENCLOSURE_KIT_THREADS when set and positive, else hardware
/// concurrency (at least 1).
unsigned default_thread_count();

}  // namespace enclosure
