#include "dykstra/convex.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace dykstra {
namespace {

constexpr double kDomTol = 1e-10;

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

Vec parse_vec(const std::string& text, int dim) {
  Vec out;
  std::string token;
  std::stringstream ss(text);
  while (std::getline(ss, token, ',')) {
    if (token == "inf") {
      out.push_back(kInf);
    } else if (token == "-inf") {
      out.push_back(-kInf);
    } else {
      out.push_back(std::stod(token));
    }
  }
  if (out.size() == 1 && dim > 1) out.assign(dim, out[0]);  // broadcast scalars
  if (static_cast<int>(out.size()) != dim)
    throw std::invalid_argument("vector literal '" + text + "' has wrong dimension");
  return out;
}

std::string format_vec(const Vec& v) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    if (v[i] == kInf)
      out << "inf";
    else if (v[i] == -kInf)
      out << "-inf";
    else
      out << v[i];
  }
  return out.str();
}

}  // namespace

ConvexFunction ConvexFunction::zero(int dim) { return ConvexFunction(Kind::Zero, dim); }

ConvexFunction ConvexFunction::quadratic(double a, Vec center) {
  if (a <= 0.0) throw std::invalid_argument("quadratic needs curvature a > 0");
  ConvexFunction f(Kind::Quadratic, static_cast<int>(center.size()));
  f.a_ = a;
  f.center_ = std::move(center);
  return f;
}

ConvexFunction ConvexFunction::indicator_point(Vec p) {
  ConvexFunction f(Kind::IndicatorPoint, static_cast<int>(p.size()));
  f.center_ = std::move(p);
  return f;
}

ConvexFunction ConvexFunction::indicator_box(Vec lo, Vec hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("box bounds dim mismatch");
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (lo[j] > hi[j]) throw std::invalid_argument("box needs lo <= hi");
  }
  ConvexFunction f(Kind::IndicatorBox, static_cast<int>(lo.size()));
  f.lo_ = std::move(lo);
  f.hi_ = std::move(hi);
  return f;
}

ConvexFunction ConvexFunction::indicator_ball(Vec center, double radius) {
  if (radius < 0.0) throw std::invalid_argument("ball needs radius >= 0");
  ConvexFunction f(Kind::IndicatorBall, static_cast<int>(center.size()));
  f.center_ = std::move(center);
  f.r_ = radius;
  return f;
}

ConvexFunction ConvexFunction::l1(double lambda, int dim) {
  if (lambda < 0.0) throw std::invalid_argument("l1 needs lambda >= 0");
  ConvexFunction f(Kind::L1, dim);
  f.lambda_ = lambda;
  return f;
}

ConvexFunction ConvexFunction::affine(Vec g, double b) {
  ConvexFunction f(Kind::Affine, static_cast<int>(g.size()));
  f.center_ = std::move(g);
  f.b_ = b;
  return f;
}

bool ConvexFunction::in_domain(const Vec& x, double tol) const {
  check_dim(x);
  switch (kind_) {
    case Kind::Zero:
    case Kind::Quadratic:
    case Kind::L1:
    case Kind::Affine:
      return true;
    case Kind::IndicatorPoint:
      return norm2(sub(x, center_)) <= tol;
    case Kind::IndicatorBox:
      for (int j = 0; j < dim_; ++j) {
        if (x[j] < lo_[j] - tol || x[j] > hi_[j] + tol) return false;
      }
      return true;
    case Kind::IndicatorBall:
      return norm2(sub(x, center_)) <= r_ + tol;
  }
  return false;
}

double ConvexFunction::eval(const Vec& x) const {
  check_dim(x);
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Quadratic:
      return 0.5 * a_ * norm2_sq(sub(x, center_));
    case Kind::L1: {
      double s = 0.0;
      for (double t : x) s += std::abs(t);
      return lambda_ * s;
    }
    case Kind::Affine:
      return dot(center_, x) + b_;
    case Kind::IndicatorPoint:
    case Kind::IndicatorBox:
    case Kind::IndicatorBall:
      return in_domain(x, kDomTol) ? 0.0 : kInf;
  }
  return kInf;
}

Vec ConvexFunction::prox(double tau, const Vec& y) const {
  check_dim(y);
  if (tau <= 0.0) throw std::invalid_argument("prox needs tau > 0");
  switch (kind_) {
    case Kind::Zero:
      return y;
    case Kind::Quadratic: {
      Vec out = y;
      axpy(out, tau * a_, center_);
      return scale(std::move(out), 1.0 / (1.0 + tau * a_));
    }
    case Kind::IndicatorPoint:
      return center_;
    case Kind::IndicatorBox: {
      Vec out(dim_);
      for (int j = 0; j < dim_; ++j) out[j] = clamp(y[j], lo_[j], hi_[j]);
      return out;
    }
    case Kind::IndicatorBall: {
      Vec delta = sub(y, center_);
      double n = norm2(delta);
      if (n <= r_) return y;
      Vec out = center_;
      axpy(out, r_ / n, delta);
      return out;
    }
    case Kind::L1: {
      Vec out(dim_);
      double t = tau * lambda_;
      for (int j = 0; j < dim_; ++j)
        out[j] = (y[j] > t) ? y[j] - t : (y[j] < -t ? y[j] + t : 0.0);
      return out;
    }
    case Kind::Affine: {
      Vec out = y;
      axpy(out, -tau, center_);
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

double ConvexFunction::conjugate_eval(const Vec& z) const {
  check_dim(z);
  switch (kind_) {
    case Kind::Zero:
      return norm2(z) <= kDomTol ? 0.0 : kInf;
    case Kind::Quadratic:
      return dot(center_, z) + norm2_sq(z) / (2.0 * a_);
    case Kind::IndicatorPoint:
      return dot(center_, z);
    case Kind::IndicatorBox: {
      double s = 0.0;
      for (int j = 0; j < dim_; ++j) {
        if (z[j] > kDomTol) {
          if (hi_[j] == kInf) return kInf;
          s += z[j] * hi_[j];
        } else if (z[j] < -kDomTol) {
          if (lo_[j] == -kInf) return kInf;
          s += z[j] * lo_[j];
        }
      }
      return s;
    }
    case Kind::IndicatorBall:
      return dot(center_, z) + r_ * norm2(z);
    case Kind::L1:
      return norm_inf(z) <= lambda_ + kDomTol ? 0.0 : kInf;
    case Kind::Affine:
      return norm2(sub(z, center_)) <= kDomTol ? -b_ : kInf;
  }
  return kInf;
}

Vec ConvexFunction::subgradient(const Vec& x) const {
  check_dim(x);
  if (!in_domain(x, kDomTol)) throw std::domain_error("point outside dom f");
  switch (kind_) {
    case Kind::Zero:
    case Kind::IndicatorPoint:
    case Kind::IndicatorBox:
    case Kind::IndicatorBall:
      return zeros(dim_);
    case Kind::Quadratic: {
      Vec out = sub(x, center_);
      return scale(std::move(out), a_);
    }
    case Kind::L1: {
      Vec out(dim_);
      for (int j = 0; j < dim_; ++j)
        out[j] = (x[j] > 0.0) ? lambda_ : (x[j] < 0.0 ? -lambda_ : 0.0);
      return out;
    }
    case Kind::Affine:
      return center_;
  }
  throw std::logic_error("unreachable");
}

Vec ConvexFunction::gradient(const Vec& x) const {
  if (!has_singleton_subdifferential())
    throw std::logic_error("gradient only defined for smooth catalog kinds");
  return subgradient(x);
}

Vec ConvexFunction::conjugate_prox(double tau, const Vec& y) const {
  // Moreau: prox_{tau f*}(y) = y - tau prox_{f/tau}(y/tau).
  Vec inner = prox(1.0 / tau, scale(Vec(y), 1.0 / tau));
  Vec out = y;
  axpy(out, -tau, inner);
  return out;
}

Vec ConvexFunction::conjugate_domain_point() const {
  return kind_ == Kind::Affine ? center_ : zeros(dim_);
}

ConvexFunction ConvexFunction::scaled_argument(double s) const {
  if (s <= 0.0) throw std::invalid_argument("scaled_argument needs s > 0");
  switch (kind_) {
    case Kind::Zero:
      return *this;
    case Kind::Quadratic:
      return quadratic(a_ / (s * s), scale(Vec(center_), s));
    case Kind::IndicatorPoint:
      return indicator_point(scale(Vec(center_), s));
    case Kind::IndicatorBox: {
      Vec lo(dim_), hi(dim_);
      for (int j = 0; j < dim_; ++j) {
        lo[j] = lo_[j] == -kInf ? -kInf : s * lo_[j];
        hi[j] = hi_[j] == kInf ? kInf : s * hi_[j];
      }
      return indicator_box(std::move(lo), std::move(hi));
    }
    case Kind::IndicatorBall:
      return indicator_ball(scale(Vec(center_), s), s * r_);
    case Kind::L1:
      return l1(lambda_ / s, dim_);
    case Kind::Affine:
      return affine(scale(Vec(center_), 1.0 / s), b_);
  }
  throw std::logic_error("unreachable");
}

ConvexFunction ConvexFunction::parse(const std::string& spec, int dim) {
  std::stringstream ss(spec);
  std::string name;
  ss >> name;
  std::map<std::string, std::string> kv;
  std::string token;
  while (ss >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad function parameter '" + token + "'");
    kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end())
      throw std::invalid_argument("function '" + name + "' missing " + key);
    return it->second;
  };
  if (name == "zero") return zero(dim);
  if (name == "quadratic")
    return quadratic(std::stod(need("a")), parse_vec(need("c"), dim));
  if (name == "point") return indicator_point(parse_vec(need("p"), dim));
  if (name == "box")
    return indicator_box(parse_vec(need("lo"), dim), parse_vec(need("hi"), dim));
  if (name == "ball")
    return indicator_ball(parse_vec(need("c"), dim), std::stod(need("r")));
  if (name == "l1") return l1(std::stod(need("lambda")), dim);
  if (name == "affine")
    return affine(parse_vec(need("g"), dim),
                  kv.count("b") ? std::stod(kv["b"]) : 0.0);
  throw std::invalid_argument("unknown function kind '" + name + "'");
}

std::string ConvexFunction::to_spec() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case Kind::Zero:
      return "zero";
    case Kind::Quadratic:
      out << "quadratic a=" << a_ << " c=" << format_vec(center_);
      break;
    case Kind::IndicatorPoint:
      out << "point p=" << format_vec(center_);
      break;
    case Kind::IndicatorBox:
      out << "box lo=" << format_vec(lo_) << " hi=" << format_vec(hi_);
      break;
    case Kind::IndicatorBall:
      out << "ball c=" << format_vec(center_) << " r=" << r_;
      break;
    case Kind::L1:
      out << "l1 lambda=" << lambda_;
      break;
    case Kind::Affine:
      out << "affine g=" << format_vec(center_) << " b=" << b_;
      break;
  }
  return out.str();
}

StationaryPoint stationary_solve(const std::vector<ConvexFunction>& funcs,
                                 const Vec& s) {
  if (funcs.empty()) throw std::invalid_argument("stationary_solve needs functions");
  const int d = funcs[0].dim();
  int other = -1;
  double curvature_sum = 0.0;
  // b collects s plus the constant parts of the singleton subdifferentials:
  // sum a_i c_i from quadratics, minus affine gradients.
  Vec b = s;
  for (int i = 0; i < static_cast<int>(funcs.size()); ++i) {
    const ConvexFunction& f = funcs[i];
    if (f.dim() != d) throw std::invalid_argument("dimension mismatch");
    if (f.has_singleton_subdifferential()) {
      curvature_sum += f.curvature();
      if (f.kind() == ConvexFunction::Kind::Quadratic)
        axpy(b, f.curvature(), f.center());
      else if (f.kind() == ConvexFunction::Kind::Affine)
        axpy(b, -1.0, f.center());
    } else {
      if (other >= 0)
        throw UnsupportedInstance(
            "stationary_solve supports at most one non-smooth function");
      other = i;
    }
  }

  Vec x;
  if (curvature_sum > 0.0) {
    Vec target = scale(Vec(b), 1.0 / curvature_sum);
    x = (other >= 0) ? funcs[other].prox(1.0 / curvature_sum, target)
                     : std::move(target);
  } else if (other >= 0) {
    // No curvature: need b in df_other(x) directly.
    const ConvexFunction& g = funcs[other];
    using K = ConvexFunction::Kind;
    switch (g.kind()) {
      case K::IndicatorPoint:
        x = g.center();
        break;
      case K::IndicatorBall: {
        double n = norm2(b);
        x = g.center();
        if (n > 0.0) axpy(x, g.radius() / n, b);
        break;
      }
      case K::IndicatorBox: {
        x = zeros(d);
        for (int j = 0; j < d; ++j) {
          if (b[j] > kDomTol) {
            if (g.hi()[j] == kInf) throw UnboundedDual("box side unbounded");
            x[j] = g.hi()[j];
          } else if (b[j] < -kDomTol) {
            if (g.lo()[j] == -kInf) throw UnboundedDual("box side unbounded");
            x[j] = g.lo()[j];
          } else {
            x[j] = clamp(0.0, g.lo()[j], g.hi()[j]);
            if (!std::isfinite(x[j])) x[j] = 0.0;
          }
        }
        break;
      }
      case K::L1: {
        if (norm_inf(b) > g.lambda() + kDomTol)
          throw UnboundedDual("residual exceeds l1 dual box");
        x = zeros(d);
        break;
      }
      default:
        throw UnsupportedInstance("stationary_solve: no curvature available");
    }
  } else {
    if (norm2(b) > kDomTol)
      throw InfeasibleInstance("sum of subdifferentials cannot reach s");
    x = zeros(d);
  }

  StationaryPoint out;
  out.x = x;
  out.y.resize(funcs.size());
  Vec residual = s;
  for (int i = 0; i < static_cast<int>(funcs.size()); ++i) {
    if (i == other) continue;
    out.y[i] = funcs[i].gradient(x);
    axpy(residual, -1.0, out.y[i]);
  }
  if (other >= 0) {
    out.y[other] = residual;  // exact: sum y_i = s by construction
  }
  return out;
}

}  // namespace dykstra
