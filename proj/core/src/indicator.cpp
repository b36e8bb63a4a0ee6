#include "enclosure/indicator.hpp"

#include "enclosure/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace enclosure {

namespace {

void check_gate(const Mesh& mesh, double tau) {
  if (!(tau > 0.0)) raise(ErrorCode::InvalidParameter, "probe tau must be > 0");
  if (tau * mesh.h_max > kResolutionGate) {
    std::ostringstream os;
    os << "tau = " << tau << " is under-resolved on this mesh (h_max = " << mesh.h_max
       << "); the largest admissible tau is " << max_admissible_tau(mesh);
    raise(ErrorCode::ProbeUnderresolved, os.str());
  }
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

IndicatorSample make_sample(double tau, double shift, double t, double j_hat) {
  IndicatorSample s;
  s.tau = tau;
  const double mag = std::abs(j_hat);
  s.underflow = !(mag >= kIndicatorFloor);
  s.sign = j_hat < 0.0 ? -1 : 1;
  s.log_abs_I = std::log(s.underflow ? kIndicatorFloor : mag) + 2.0 * tau * (shift - t);
  return s;
}

}  // namespace

Probe make_probe(const Domain& domain, const DirectionFrame& frame, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) raise(ErrorCode::InvalidParameter, "probe tau must be > 0");
  return {frame, tau, support_function(domain, frame.theta())};
}

double max_admissible_tau(const Mesh& mesh) { return kResolutionGate / mesh.h_max; }

Complex probe_value(const Probe& probe, const Vec2& x) {
  const double re = probe.tau * (x.dot(probe.frame.theta()) - probe.shift);
  const double im = probe.tau * x.dot(probe.frame.theta_perp());
  return std::exp(re) * Complex(std::cos(im), std::sin(im));
}

std::vector<Complex> cgo_trace(const Mesh& mesh, const Probe& probe) {
  check_gate(mesh, probe.tau);
  std::vector<Complex> f;
  f.reserve(mesh.boundary_vertices.size());
  for (int v : mesh.boundary_vertices) f.push_back(probe_value(probe, mesh.vertices[static_cast<std::size_t>(v)]));
  return f;
}

IndicatorCurve shift_curve(const IndicatorCurve& curve, double t) {
  IndicatorCurve out = curve;
  out.t = t;
  for (auto& s : out.samples) s.log_abs_I -= 2.0 * s.tau * (t - curve.t);
  return out;
}

IndicatorEngine::IndicatorEngine(const Mesh& mesh, const Domain& domain, CoeffField coeff,
                                 Complex c0, Complex rescale)
    : mesh_(&mesh),
      domain_(domain),
      c0_(c0),
      rescale_(rescale),
      system_(mesh, std::move(coeff)),
      geom_(element_geometry(mesh)),
      contrast_(contrast_triangles(system_.coefficients(), c0)) {}

IndicatorEngine::IndicatorEngine(const Mesh& mesh, const Domain& domain, const ReducedScene& scene)
    : IndicatorEngine(mesh, domain, reduced_coefficients(mesh, scene), Complex(1.0, 0.0),
                      Complex(1.0, 0.0)) {}

IndicatorEngine IndicatorEngine::from_original(const Mesh& mesh, const Domain& domain,
                                               const MaterialScene& scene) {
  validate(scene);
  const Complex c0(scene.sigma0, -scene.omega * scene.eps0);
  return IndicatorEngine(mesh, domain, original_coefficients(mesh, scene), c0,
                         dtn_rescale(Complex(1.0, 0.0), scene.sigma0, scene.eps0, scene.omega));
}

std::vector<Complex> IndicatorEngine::pairings(const DirectionFrame& frame,
                                               std::span<const double> taus) const {
  for (std::size_t k = 0; k < taus.size(); ++k) {
    check_gate(*mesh_, taus[k]);
    if (k > 0 && !(taus[k] > taus[k - 1]))
      raise(ErrorCode::InvalidParameter, "tau samples must be strictly increasing");
  }
  std::vector<Complex> out(taus.size(), Complex(0.0));
  if (contrast_.empty() || taus.empty()) return out;

  // u = u0 + w with u0 the exact probe field. The scattered part w vanishes on
  // the boundary and is driven only by the contrast, so the pairing is
  // formed from quantities of the size of the probe near the inclusion.
  const auto nv = static_cast<Eigen::Index>(mesh_->vertices.size());
  const auto nt = static_cast<Eigen::Index>(taus.size());
  MatrixC U0(nv, nt);
  for (Eigen::Index k = 0; k < nt; ++k) {
    const Probe p = make_probe(domain_, frame, taus[static_cast<std::size_t>(k)]);
    for (Eigen::Index v = 0; v < nv; ++v)
      U0(v, k) = probe_value(p, mesh_->vertices[static_cast<std::size_t>(v)]);
  }

  const auto& coeff = system_.coefficients().per_triangle;
  MatrixC load = MatrixC::Zero(nv, nt);
  for (int t : contrast_) {
    const auto& tri = mesh_->triangles[static_cast<std::size_t>(t)];
    const auto& g = geom_[static_cast<std::size_t>(t)];
    const CSymMat2& A = coeff[static_cast<std::size_t>(t)];
    const Complex d11 = A.c11 - c0_, d12 = A.c12, d22 = A.c22 - c0_;
    for (Eigen::Index k = 0; k < nt; ++k) {
      Complex gx(0.0), gy(0.0);
      for (int i = 0; i < 3; ++i) {
        gx += U0(tri[i], k) * g.grad[i].x();
        gy += U0(tri[i], k) * g.grad[i].y();
      }
      const Complex qx = d11 * gx + d12 * gy;
      const Complex qy = d12 * gx + d22 * gy;
      for (int i = 0; i < 3; ++i)
        load(tri[i], k) -= g.area * (qx * g.grad[i].x() + qy * g.grad[i].y());
    }
  }
  const MatrixC U = U0 + system_.solve_homogeneous(load);
  for (Eigen::Index k = 0; k < nt; ++k) {
    const VectorC v0 = U0.col(k).conjugate();
    out[static_cast<std::size_t>(k)] =
        rescale_ * contrast_pairing(geom_, *mesh_, system_.coefficients(), c0_, U.col(k), v0, contrast_);
  }
  return out;
}

Complex IndicatorEngine::shifted_pairing(const Probe& probe) const {
  const double tau = probe.tau;
  return pairings(probe.frame, std::span<const double>(&tau, 1)).front();
}

IndicatorSample IndicatorEngine::indicator(const Probe& probe, double t) const {
  return make_sample(probe.tau, probe.shift, t, shifted_pairing(probe).real());
}

IndicatorCurve IndicatorEngine::curve(const DirectionFrame& frame, std::span<const double> taus,
                                      double t) const {
  const auto values = pairings(frame, taus);
  const double shift = support_function(domain_, frame.theta());
  IndicatorCurve c{frame, t, {}};
  c.samples.reserve(taus.size());
  for (std::size_t k = 0; k < taus.size(); ++k)
    c.samples.push_back(make_sample(taus[k], shift, t, values[k].real()));
  return c;
}

IndicatorSample indicator(const ReducedScene& scene, const Mesh& mesh, const Domain& domain,
                          const Probe& probe, double t) {
  const IndicatorEngine engine(mesh, domain, scene);
  return engine.indicator(probe, t);
}

SupportEstimate estimate_support(const IndicatorCurve& curve) {
  if (curve.t != 0.0) raise(ErrorCode::Estimation, "support estimation expects a curve at t = 0");
  const auto& s = curve.samples;
  if (s.size() < 8) raise(ErrorCode::Estimation, "support estimation needs at least 8 samples");
  const double lo = s.front().tau;
  const double hi = s.back().tau;
  const double cut = lo + 0.5 * (hi - lo);

  std::vector<const IndicatorSample*> window;
  for (const auto& x : s) {
    if (x.tau >= cut - 1e-12 * std::max(1.0, std::abs(cut))) window.push_back(&x);
  }
  if (window.size() < 4) raise(ErrorCode::Estimation, "fit window holds fewer than 4 samples");
  for (const auto* x : window) {
    if (x->underflow) raise(ErrorCode::Estimation, "indicator underflowed inside the fit window");
  }

  const double n = static_cast<double>(window.size());
  double mx = 0.0, my = 0.0;
  for (const auto* x : window) {
    mx += 2.0 * x->tau;
    my += x->log_abs_I;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto* x : window) {
    const double dx = 2.0 * x->tau - mx;
    sxx += dx * dx;
    sxy += dx * (x->log_abs_I - my);
  }
  const double slope = sxy / sxx;
  double rss = 0.0;
  for (const auto* x : window) {
    const double r = x->log_abs_I - (my + slope * (2.0 * x->tau - mx));
    rss += r * r;
  }

  SupportEstimate e;
  e.frame = curve.frame;
  e.h_hat = slope;
  e.fit_residual = std::sqrt(rss / n);
  e.tau_lo = window.front()->tau;
  e.tau_hi = window.back()->tau;
  e.n_fit = window.size();
  return e;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i)
    v[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("ENCLOSURE_KIT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult sweep(const MaterialScene& scene, const Domain& domain, const Mesh& mesh,
                  const SweepOptions& options) {
  validate(scene);
  const IndicatorEngine engine(mesh, domain, reduce(scene));
  return sweep(scene, engine, options);
}

SweepResult sweep(const MaterialScene& scene, const IndicatorEngine& engine,
                  const SweepOptions& options) {
  if (options.n_directions < 8) raise(ErrorCode::InvalidParameter, "sweep needs at least 8 directions");
  if (options.taus.empty()) raise(ErrorCode::InvalidParameter, "sweep needs tau samples");
  validate(scene);

  const auto n = static_cast<std::size_t>(options.n_directions);
  const auto shapes = scene.shapes();
  SweepResult result;
  result.directions.resize(n);
  const unsigned threads = options.threads > 0 ? options.threads : default_thread_count();

  parallel_for(n, threads, [&](std::size_t k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    DirectionResult& d = result.directions[k];
    d.index = static_cast<int>(k);
    d.frame = DirectionFrame::from_angle(angle);
    d.curve = engine.curve(d.frame, options.taus, 0.0);
    if (!shapes.empty()) d.regime = classify_regime(scene, d.frame, options.delta);
  });

  result.detected = std::any_of(result.directions.begin(), result.directions.end(), [](const auto& d) {
    return std::any_of(d.curve.samples.begin(), d.curve.samples.end(),
                       [](const IndicatorSample& s) { return !s.underflow; });
  });
  if (!result.detected) return result;

  std::vector<SupportSample> support;
  support.reserve(n);
  for (auto& d : result.directions) {
    d.estimate = estimate_support(d.curve);
    if (!shapes.empty()) d.estimate->h_exact = support_function(shapes, d.frame.theta());
    support.push_back({d.frame, d.estimate->h_hat});
  }
  result.hull = hull_from_support(support);
  return result;
}

}  // namespace enclosure
