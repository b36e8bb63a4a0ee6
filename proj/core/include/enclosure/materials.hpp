#pragma once

#include "enclosure/geometry.hpp"

#include <complex>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace enclosure {

using Complex = std::complex<double>;

/// Real symmetric 2x2 matrix stored as (a11, a12, a22).
struct SymMat2 {
  double a11 = 0.0;
  double a12 = 0.0;
  double a22 = 0.0;

  static constexpr SymMat2 identity() { return {1.0, 0.0, 1.0}; }
  static constexpr SymMat2 zero() { return {0.0, 0.0, 0.0}; }
  static constexpr SymMat2 scalar(double s) { return {s, 0.0, s}; }

  double quadratic_form(const Vec2& xi) const {
    return a11 * xi.x() * xi.x() + 2.0 * a12 * xi.x() * xi.y() + a22 * xi.y() * xi.y();
  }

  friend constexpr SymMat2 operator+(const SymMat2& a, const SymMat2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a22 + b.a22};
  }
  friend constexpr SymMat2 operator-(const SymMat2& a, const SymMat2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a22 - b.a22};
  }
  friend constexpr SymMat2 operator-(const SymMat2& a) { return {-a.a11, -a.a12, -a.a22}; }
  friend constexpr SymMat2 operator*(double s, const SymMat2& a) {
    return {s * a.a11, s * a.a12, s * a.a22};
  }
  friend constexpr SymMat2 operator/(const SymMat2& a, double s) {
    return {a.a11 / s, a.a12 / s, a.a22 / s};
  }
  friend constexpr bool operator==(const SymMat2&, const SymMat2&) = default;
};

/// Complex symmetric (not Hermitian) 2x2 matrix, e.g. sigma - i*omega*eps.
struct CSymMat2 {
  Complex c11{};
  Complex c12{};
  Complex c22{};

  /// re - i*omega*im
  static CSymMat2 from_parts(const SymMat2& re, double omega, const SymMat2& im) {
    const Complex j(0.0, omega);
    return {re.a11 - j * im.a11, re.a12 - j * im.a12, re.a22 - j * im.a22};
  }
};

struct Eigenvalues2 {
  double min;
  double max;
};

/// Closed-form eigenvalues of a symmetric 2x2 matrix.
Eigenvalues2 eig_sym2(const SymMat2& m);

/// Operator norm (largest |eigenvalue|).
double operator_norm(const SymMat2& m);

struct Inclusion {
  Shape shape;
  SymMat2 alpha;  // conductivity perturbation
  SymMat2 beta;   // permittivity perturbation
};

/// Background constants and piecewise-constant inclusions. Where inclusions
/// overlap the later entry in `inclusions` determines the material.
struct MaterialScene {
  double sigma0 = 1.0;
  double eps0 = 1.0;
  double omega = 0.0;
  std::vector<Inclusion> inclusions;

  /// Index of the inclusion governing x, or -1 for background.
  int region_at(const Vec2& x) const;
  SymMat2 sigma_at(const Vec2& x) const;
  SymMat2 eps_at(const Vec2& x) const;
  std::vector<Shape> shapes() const;
};

/// Throws InvalidScene when sigma0 < 0, eps0 <= 0, omega < 0, sigma0 = omega = 0,
/// sigma = sigma0 I + alpha is not positive semidefinite, or
/// eps = eps0 I + beta is not positive definite, or a shape is invalid.
void validate(const MaterialScene& scene);

/// sigma0^2 + omega^2 eps0^2; throws DegenerateBackground when zero.
double background_modulus(double sigma0, double eps0, double omega);

struct ReducedInclusion {
  SymMat2 a;
  SymMat2 b;
};

/// Identity background with sigma~ = I + a and eps~ = b inside each inclusion.
struct ReducedScene {
  double omega = 0.0;
  std::vector<Shape> shapes;
  std::vector<ReducedInclusion> inclusions;

  int region_at(const Vec2& x) const;
  SymMat2 sigma_tilde_at(const Vec2& x) const;
  SymMat2 eps_tilde_at(const Vec2& x) const;
};

/// a = (sigma0 alpha + omega^2 eps0 beta)/(sigma0^2 + omega^2 eps0^2),
/// b = (-eps0 alpha + sigma0 beta)/(sigma0^2 + omega^2 eps0^2).
ReducedScene reduce(const MaterialScene& scene);

struct ReducedPair {
  SymMat2 sigma_tilde;
  SymMat2 eps_tilde;
};

/// Pointwise reduction of raw (sigma, eps) with the background factored out.
ReducedPair reduce_pointwise(double sigma0, double eps0, double omega, const SymMat2& sigma,
                             const SymMat2& eps);

/// value / (sigma0 - i omega eps0): converts a pairing of the original DtN map
/// into a pairing of the reduced one.
Complex dtn_rescale(Complex value, double sigma0, double eps0, double omega);

enum class Jump { None, Positive, Negative };

std::string to_string(Jump jump);

struct JumpResult {
  Jump jump = Jump::None;
  double c_theta = 0.0;  // infimum of the signed lowest eigenvalue; 0 when jump is None
};

/// 0.1 * (h_D(theta) - inf_{x in D} x.theta).
double default_slab_depth(const MaterialScene& scene, const DirectionFrame& frame);

/// Indices of inclusions meeting the slab D_theta(delta). Throws
/// InvalidParameter for delta <= 0 and EmptySlab when the scene has no
/// inclusion.
std::vector<int> slab_regions(const MaterialScene& scene, const DirectionFrame& frame,
                              double delta);

/// Jump classification from the eigenvalues of the reduced perturbation a.
JumpResult check_jump(const MaterialScene& scene, const DirectionFrame& frame, double delta);

/// The same classification evaluated on the original tensors through the
/// quadratic form of sigma0 alpha + omega^2 eps0 beta, divided by
/// sigma0^2 + omega^2 eps0^2.
JumpResult check_jump_original(const MaterialScene& scene, const DirectionFrame& frame,
                               double delta);

struct MaterialBounds {
  double m;  // ess inf over D of lambda_min(sigma~)
  double M;  // ess sup over D of ||b||
};

/// m = 1, M = 0 for a scene without inclusions.
MaterialBounds bounds_mM(const MaterialScene& scene);

/// sqrt(m C) / M, +inf when M = 0. Throws InvalidConstants unless m > 0, C > 0, M >= 0.
double frequency_bound(double m, double c_theta, double M);

struct PQWeights {
  double P;
  double Q;
};

/// P = sigma0^2/(sigma0^2 + omega^2 eps0^2), Q = 1 - P. All inputs must be > 0.
PQWeights pq_weights(double sigma0, double eps0, double omega);

struct SimilarityResult {
  double R;    // max over inclusions of ||alpha/sigma0 - beta/eps0||
  double rhs;  // 2 sqrt(m C)
  bool holds;  // R < rhs
};

SimilarityResult similarity_check(const MaterialScene& scene, double m, double c_theta);

/// Sufficient conditions for recovering h_D(theta) from the indicator.
enum class Regime {
  PositiveJump,               // positive jump, no frequency restriction
  NegativeJumpBelowBound,     // negative jump, omega < sqrt(m C)/M
  NegativeJumpSimilarity,     // negative jump, relative-contrast similarity holds
  PositiveJumpRelative,       // positive jump stated through relative contrasts (sigma0 > 0)
};

std::string to_string(Regime regime);

struct RegimeReport {
  DirectionFrame direction{Vec2(1.0, 0.0)};
  Jump jump = Jump::None;
  double c_theta = 0.0;
  double delta_theta = 0.0;
  double m = 1.0;
  double M = 0.0;
  double omega = 0.0;
  double omega_max = 0.0;  // +inf for a positive jump or M = 0, NaN for no jump
  double P = 0.0;  // sigma0^2 / (sigma0^2 + omega^2 eps0^2)
  double Q = 0.0;  // 1 - P
  double similarity_lhs = 0.0;  // NaN when sigma0 = 0
  double similarity_rhs = 0.0;
  std::set<Regime> applicable;

  bool proven() const { return !applicable.empty(); }
};

/// delta <= 0 selects default_slab_depth.
RegimeReport classify_regime(const MaterialScene& scene, const DirectionFrame& frame,
                             double delta = 0.0);

std::string to_text(const RegimeReport& report);
std::string to_json(const RegimeReport& report);

/// Largest frequency for which the negative-jump bound is met when the
/// constants are evaluated at omega -> 0 (sigma0 > 0 required). Used to
/// place scenarios relative to the bound.
double static_frequency_bound(const MaterialScene& scene, const DirectionFrame& frame,
                              double delta = 0.0);

}  // namespace enclosure
