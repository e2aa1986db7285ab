#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dykstra/vec.hpp"

namespace dykstra {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct UnsupportedInstance : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfeasibleInstance : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnboundedDual : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Closed convex function on R^d with closed-form eval / prox /
// conjugate / subgradient oracles.
//
// Kinds:
//   Zero            f(x) = 0                 f* = indicator of {0}
//   Quadratic       f(x) = (a/2)|x-c|^2      f*(z) = <c,z> + |z|^2/(2a)
//   IndicatorPoint  f = delta_{p}            f*(z) = <p,z>
//   IndicatorBox    f = delta_[lo,hi]        f* = support function of the box
//   IndicatorBall   f = delta_B(center,r)    f*(z) = <center,z> + r|z|
//   L1              f(x) = lambda*|x|_1      f* = indicator of |z|_inf <= lambda
//   Affine          f(x) = <g,x> + b         f* = indicator of {g}, value -b
class ConvexFunction {
 public:
  enum class Kind { Zero, Quadratic, IndicatorPoint, IndicatorBox, IndicatorBall, L1, Affine };

  static ConvexFunction zero(int dim);
  static ConvexFunction quadratic(double a, Vec center);
  static ConvexFunction indicator_point(Vec p);
  static ConvexFunction indicator_box(Vec lo, Vec hi);
  static ConvexFunction indicator_ball(Vec center, double radius);
  static ConvexFunction l1(double lambda, int dim);
  static ConvexFunction affine(Vec g, double b);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  double eval(const Vec& x) const;
  // argmin_x f(x) + (1/(2 tau)) |x - y|^2, tau > 0, exact closed form.
  Vec prox(double tau, const Vec& y) const;
  double conjugate_eval(const Vec& z) const;
  // Canonical subgradient selection (0 at kinks and inside indicator
  // domains). Throws std::domain_error outside dom f.
  Vec subgradient(const Vec& x) const;

  // prox of f* with step tau, via the Moreau identity.
  Vec conjugate_prox(double tau, const Vec& y) const;

  // True only for kinds whose conjugate is smooth on its domain;
  // in this catalog that is the strongly convex quadratic.
  bool conjugate_smooth() const { return kind_ == Kind::Quadratic; }

  // A point in dom f*, used to seed dual iterates.
  Vec conjugate_domain_point() const;

  bool in_domain(const Vec& x, double tol = 1e-9) const;

  // Curvature a for Quadratic, 0 otherwise.
  double curvature() const { return kind_ == Kind::Quadratic ? a_ : 0.0; }
  // Gradient for kinds with a singleton subdifferential everywhere
  // (Zero, Quadratic, Affine); throws for the others.
  Vec gradient(const Vec& x) const;
  bool has_singleton_subdifferential() const {
    return kind_ == Kind::Zero || kind_ == Kind::Quadratic || kind_ == Kind::Affine;
  }

  // f composed with x -> x/s (s > 0); stays inside the catalog.
  ConvexFunction scaled_argument(double s) const;

  // Accessors for bindings / serialization.
  double quad_a() const { return a_; }
  double radius() const { return r_; }
  double lambda() const { return lambda_; }
  double offset() const { return b_; }
  const Vec& center() const { return center_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }

  // Config spec strings, e.g. "quadratic a=1 c=-1", "point p=0",
  // "box lo=0 hi=inf", "l1 lambda=0.5", "ball c=0,0 r=1", "zero",
  // "affine g=1 b=0". Vector values are comma-separated.
  static ConvexFunction parse(const std::string& spec, int dim);
  std::string to_spec() const;

 private:
  ConvexFunction(Kind k, int dim) : kind_(k), dim_(dim) {}
  void check_dim(const Vec& x) const {
    if (static_cast<int>(x.size()) != dim_)
      throw std::invalid_argument("dimension mismatch");
  }

  Kind kind_;
  int dim_;
  double a_ = 0.0;       // Quadratic curvature
  double r_ = 0.0;       // Ball radius
  double lambda_ = 0.0;  // L1 weight
  double b_ = 0.0;       // Affine offset
  Vec center_;           // Quadratic/Ball center, Point p, Affine g
  Vec lo_, hi_;          // Box bounds
};

// Solve sum_i df_i(x) contains s for catalog functions: all entries with
// singleton subdifferentials plus at most one other (reduced to a prox).
// Returns the primal point x and per-function duals y_i in df_i(x) with
// sum y_i = s; the KKT pair of the subset dual-ascent subproblem.
struct StationaryPoint {
  Vec x;
  std::vector<Vec> y;
};
StationaryPoint stationary_solve(const std::vector<ConvexFunction>& funcs,
                                 const Vec& s);

}  // namespace dykstra
