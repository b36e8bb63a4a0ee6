#include "enclosure/materials.hpp"

#include "enclosure/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace enclosure {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int last_containing(const std::vector<Shape>& shapes, const Vec2& x) {
  for (int i = static_cast<int>(shapes.size()) - 1; i >= 0; --i) {
    if (contains(shapes[static_cast<std::size_t>(i)], x)) return i;
  }
  return -1;
}

SymMat2 perturbation_form(const MaterialScene& s, const Inclusion& inc) {
  return s.sigma0 * inc.alpha + (s.omega * s.omega * s.eps0) * inc.beta;
}

JumpResult classify(const std::vector<Eigenvalues2>& eigs) {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& e : eigs) {
    lo = std::min(lo, e.min);
    hi = std::max(hi, e.max);
  }
  if (lo > 0.0) return {Jump::Positive, lo};
  if (hi < 0.0) return {Jump::Negative, -hi};
  return {Jump::None, 0.0};
}

nlohmann::json number_or_token(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  return v;
}

}  // namespace

Eigenvalues2 eig_sym2(const SymMat2& m) {
  const double mean = 0.5 * (m.a11 + m.a22);
  const double radius = std::hypot(0.5 * (m.a11 - m.a22), m.a12);
  return {mean - radius, mean + radius};
}

double operator_norm(const SymMat2& m) {
  const auto e = eig_sym2(m);
  return std::max(std::abs(e.min), std::abs(e.max));
}

int MaterialScene::region_at(const Vec2& x) const {
  for (int i = static_cast<int>(inclusions.size()) - 1; i >= 0; --i) {
    if (contains(inclusions[static_cast<std::size_t>(i)].shape, x)) return i;
  }
  return -1;
}

SymMat2 MaterialScene::sigma_at(const Vec2& x) const {
  const int r = region_at(x);
  const SymMat2 bg = SymMat2::scalar(sigma0);
  return r < 0 ? bg : bg + inclusions[static_cast<std::size_t>(r)].alpha;
}

SymMat2 MaterialScene::eps_at(const Vec2& x) const {
  const int r = region_at(x);
  const SymMat2 bg = SymMat2::scalar(eps0);
  return r < 0 ? bg : bg + inclusions[static_cast<std::size_t>(r)].beta;
}

std::vector<Shape> MaterialScene::shapes() const {
  std::vector<Shape> out;
  out.reserve(inclusions.size());
  for (const auto& inc : inclusions) out.push_back(inc.shape);
  return out;
}

void validate(const MaterialScene& scene) {
  auto fail = [](const std::string& msg) { raise(ErrorCode::InvalidScene, msg); };
  if (!std::isfinite(scene.sigma0) || scene.sigma0 < 0.0)
    fail("background conductivity sigma0 must be >= 0");
  if (!std::isfinite(scene.eps0) || !(scene.eps0 > 0.0))
    fail("background permittivity eps0 must be > 0");
  if (!std::isfinite(scene.omega) || scene.omega < 0.0) fail("frequency omega must be >= 0");
  if (scene.sigma0 == 0.0 && scene.omega == 0.0)
    fail("sigma0 = 0 together with omega = 0 leaves the operator without coercivity");
  for (std::size_t i = 0; i < scene.inclusions.size(); ++i) {
    const auto& inc = scene.inclusions[i];
    try {
      validate(inc.shape);
    } catch (const Error& e) {
      fail("inclusion " + std::to_string(i) + ": " + e.what());
    }
    const auto s = eig_sym2(SymMat2::scalar(scene.sigma0) + inc.alpha);
    if (s.min < 0.0)
      fail("inclusion " + std::to_string(i) + ": sigma0 I + alpha must be positive semidefinite");
    const auto e = eig_sym2(SymMat2::scalar(scene.eps0) + inc.beta);
    if (!(e.min > 0.0))
      fail("inclusion " + std::to_string(i) + ": eps0 I + beta must be positive definite");
  }
}

double background_modulus(double sigma0, double eps0, double omega) {
  const double d = sigma0 * sigma0 + omega * omega * eps0 * eps0;
  if (!(d > 0.0))
    raise(ErrorCode::DegenerateBackground, "sigma0^2 + omega^2 eps0^2 vanishes");
  return d;
}

int ReducedScene::region_at(const Vec2& x) const { return last_containing(shapes, x); }

SymMat2 ReducedScene::sigma_tilde_at(const Vec2& x) const {
  const int r = region_at(x);
  return r < 0 ? SymMat2::identity()
               : SymMat2::identity() + inclusions[static_cast<std::size_t>(r)].a;
}

SymMat2 ReducedScene::eps_tilde_at(const Vec2& x) const {
  const int r = region_at(x);
  return r < 0 ? SymMat2::zero() : inclusions[static_cast<std::size_t>(r)].b;
}

ReducedScene reduce(const MaterialScene& scene) {
  const double den = background_modulus(scene.sigma0, scene.eps0, scene.omega);
  const double w2 = scene.omega * scene.omega;
  ReducedScene out;
  out.omega = scene.omega;
  out.shapes = scene.shapes();
  out.inclusions.reserve(scene.inclusions.size());
  for (const auto& inc : scene.inclusions) {
    out.inclusions.push_back({(scene.sigma0 * inc.alpha + (w2 * scene.eps0) * inc.beta) / den,
                              (scene.sigma0 * inc.beta - scene.eps0 * inc.alpha) / den});
  }
  return out;
}

ReducedPair reduce_pointwise(double sigma0, double eps0, double omega, const SymMat2& sigma,
                             const SymMat2& eps) {
  const double den = background_modulus(sigma0, eps0, omega);
  return {(sigma0 * sigma + (omega * omega * eps0) * eps) / den,
          (sigma0 * eps - eps0 * sigma) / den};
}

Complex dtn_rescale(Complex value, double sigma0, double eps0, double omega) {
  const Complex factor(sigma0, -omega * eps0);
  if (factor == Complex(0.0, 0.0))
    raise(ErrorCode::DegenerateBackground, "sigma0 - i omega eps0 vanishes");
  return value / factor;
}

std::string to_string(Jump jump) {
  switch (jump) {
    case Jump::Positive: return "positive";
    case Jump::Negative: return "negative";
    case Jump::None: break;
  }
  return "none";
}

double default_slab_depth(const MaterialScene& scene, const DirectionFrame& frame) {
  const auto shapes = scene.shapes();
  if (shapes.empty()) raise(ErrorCode::EmptySlab, "scene has no inclusion");
  return 0.1 * (support_function(shapes, frame.theta()) +
                support_function(shapes, Vec2(-frame.theta())));
}

std::vector<int> slab_regions(const MaterialScene& scene, const DirectionFrame& frame,
                              double delta) {
  if (!(delta > 0.0)) raise(ErrorCode::InvalidParameter, "slab depth delta must be > 0");
  if (scene.inclusions.empty()) raise(ErrorCode::EmptySlab, "scene has no inclusion");
  const auto shapes = scene.shapes();
  const double h = support_function(shapes, frame.theta());
  std::vector<int> out;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (support_function(shapes[i], frame.theta()) > h - delta) out.push_back(static_cast<int>(i));
  }
  if (out.empty()) raise(ErrorCode::EmptySlab, "slab contains no inclusion material");
  return out;
}

JumpResult check_jump(const MaterialScene& scene, const DirectionFrame& frame, double delta) {
  const auto regions = slab_regions(scene, frame, delta);
  const auto reduced = reduce(scene);
  std::vector<Eigenvalues2> eigs;
  for (int r : regions) eigs.push_back(eig_sym2(reduced.inclusions[static_cast<std::size_t>(r)].a));
  return classify(eigs);
}

JumpResult check_jump_original(const MaterialScene& scene, const DirectionFrame& frame,
                               double delta) {
  const auto regions = slab_regions(scene, frame, delta);
  const double den = background_modulus(scene.sigma0, scene.eps0, scene.omega);
  std::vector<Eigenvalues2> eigs;
  for (int r : regions) {
    const auto e = eig_sym2(perturbation_form(scene, scene.inclusions[static_cast<std::size_t>(r)]));
    eigs.push_back({e.min / den, e.max / den});
  }
  return classify(eigs);
}

MaterialBounds bounds_mM(const MaterialScene& scene) {
  const auto reduced = reduce(scene);
  MaterialBounds b{1.0, 0.0};
  if (reduced.inclusions.empty()) return b;
  b.m = kInf;
  for (const auto& inc : reduced.inclusions) {
    b.m = std::min(b.m, eig_sym2(SymMat2::identity() + inc.a).min);
    b.M = std::max(b.M, operator_norm(inc.b));
  }
  return b;
}

double frequency_bound(double m, double c_theta, double M) {
  if (!(m > 0.0) || !(c_theta > 0.0) || !(M >= 0.0))
    raise(ErrorCode::InvalidConstants, "frequency bound needs m > 0, C > 0 and M >= 0");
  if (M == 0.0) return kInf;
  return std::sqrt(m * c_theta) / M;
}

PQWeights pq_weights(double sigma0, double eps0, double omega) {
  if (!(sigma0 > 0.0) || !(eps0 > 0.0) || !(omega > 0.0))
    raise(ErrorCode::InvalidParameter, "P/Q weights need sigma0, eps0 and omega all > 0");
  const double s2 = sigma0 * sigma0;
  const double w2e2 = omega * omega * eps0 * eps0;
  return {s2 / (s2 + w2e2), w2e2 / (s2 + w2e2)};
}

SimilarityResult similarity_check(const MaterialScene& scene, double m, double c_theta) {
  if (!(scene.sigma0 > 0.0) || !(scene.eps0 > 0.0))
    raise(ErrorCode::InvalidParameter, "similarity condition needs sigma0 > 0 and eps0 > 0");
  if (!(m > 0.0) || !(c_theta > 0.0))
    raise(ErrorCode::InvalidConstants, "similarity condition needs m > 0 and C > 0");
  double R = 0.0;
  for (const auto& inc : scene.inclusions)
    R = std::max(R, operator_norm(inc.alpha / scene.sigma0 - inc.beta / scene.eps0));
  const double rhs = 2.0 * std::sqrt(m * c_theta);
  return {R, rhs, R < rhs};
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::PositiveJump: return "positive_jump";
    case Regime::NegativeJumpBelowBound: return "negative_jump_below_frequency_bound";
    case Regime::NegativeJumpSimilarity: return "negative_jump_similarity";
    case Regime::PositiveJumpRelative: return "positive_jump_relative_contrast";
  }
  return "unknown";
}

RegimeReport classify_regime(const MaterialScene& scene, const DirectionFrame& frame,
                             double delta) {
  validate(scene);
  RegimeReport r;
  r.direction = frame;
  r.delta_theta = delta > 0.0 ? delta : default_slab_depth(scene, frame);
  const auto jr = check_jump(scene, frame, r.delta_theta);
  r.jump = jr.jump;
  r.c_theta = jr.c_theta;
  const auto b = bounds_mM(scene);
  r.m = b.m;
  r.M = b.M;
  r.omega = scene.omega;

  const double den = background_modulus(scene.sigma0, scene.eps0, scene.omega);
  r.P = scene.sigma0 * scene.sigma0 / den;
  r.Q = scene.omega * scene.omega * scene.eps0 * scene.eps0 / den;

  r.similarity_lhs = kNaN;
  r.similarity_rhs = kNaN;
  if (scene.sigma0 > 0.0) {
    double R = 0.0;
    for (const auto& inc : scene.inclusions)
      R = std::max(R, operator_norm(inc.alpha / scene.sigma0 - inc.beta / scene.eps0));
    r.similarity_lhs = R;
    if (r.jump != Jump::None) r.similarity_rhs = 2.0 * std::sqrt(r.m * r.c_theta);
  }

  switch (r.jump) {
    case Jump::Positive:
      r.omega_max = kInf;
      r.applicable.insert(Regime::PositiveJump);
      if (scene.sigma0 > 0.0) r.applicable.insert(Regime::PositiveJumpRelative);
      break;
    case Jump::Negative:
      r.omega_max = frequency_bound(r.m, r.c_theta, r.M);
      if (scene.omega < r.omega_max) r.applicable.insert(Regime::NegativeJumpBelowBound);
      if (scene.sigma0 > 0.0 && similarity_check(scene, r.m, r.c_theta).holds)
        r.applicable.insert(Regime::NegativeJumpSimilarity);
      break;
    case Jump::None:
      r.omega_max = kNaN;
      break;
  }
  return r;
}

std::string to_text(const RegimeReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "direction      : (" << r.direction.theta().x() << ", " << r.direction.theta().y() << ")\n"
     << "slab depth     : " << r.delta_theta << "\n"
     << "jump           : " << to_string(r.jump);
  if (r.jump != Jump::None) os << " (C_theta = " << r.c_theta << ")";
  os << "\n"
     << "m, M           : " << r.m << ", " << r.M << "\n"
     << "omega, max     : " << r.omega << ", " << r.omega_max << "\n"
     << "P, Q           : " << r.P << ", " << r.Q << "\n"
     << "similarity     : R = " << r.similarity_lhs << ", 2 sqrt(m C) = " << r.similarity_rhs
     << "\n"
     << "applicable     :";
  if (r.applicable.empty()) {
    os << " none (outside proven regime)";
  } else {
    for (auto a : r.applicable) os << " " << to_string(a);
  }
  os << "\n";
  return os.str();
}

std::string to_json(const RegimeReport& r) {
  nlohmann::json j;
  j["theta"] = {r.direction.theta().x(), r.direction.theta().y()};
  j["delta"] = r.delta_theta;
  j["jump"] = to_string(r.jump);
  j["C_theta"] = r.jump == Jump::None ? nlohmann::json(nullptr) : nlohmann::json(r.c_theta);
  j["m"] = r.m;
  j["M"] = r.M;
  j["omega"] = r.omega;
  j["omega_max"] = number_or_token(r.omega_max);
  j["P"] = r.P;
  j["Q"] = r.Q;
  j["R"] = number_or_token(r.similarity_lhs);
  j["rhs"] = number_or_token(r.similarity_rhs);
  auto list = nlohmann::json::array();
  for (auto a : r.applicable) list.push_back(to_string(a));
  j["applicable"] = list;
  return j.dump();
}

double static_frequency_bound(const MaterialScene& scene, const DirectionFrame& frame,
                              double delta) {
  if (!(scene.sigma0 > 0.0))
    raise(ErrorCode::InvalidParameter, "static frequency bound needs sigma0 > 0");
  MaterialScene s = scene;
  s.omega = 0.0;
  const double d = delta > 0.0 ? delta : default_slab_depth(s, frame);
  const auto jr = check_jump(s, frame, d);
  if (jr.jump != Jump::Negative)
    raise(ErrorCode::InvalidConstants, "static frequency bound needs a negative jump at omega = 0");
  const auto b = bounds_mM(s);
  return frequency_bound(b.m, jr.c_theta, b.M);
}

}  // namespace enclosure
