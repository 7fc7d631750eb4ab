#pragma once

// Spectral windows and the lower/upper bound constructions for the quadratic
// perspective T* f(|V T^-1|^2) T of a convex function f.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "opv/funcatalog.hpp"
#include "opv/matfun.hpp"
#include "opv/matrix_json.hpp"
#include "opv/perspectives.hpp"

namespace opv {

/// m^2 1 <= |V T^-1|^2 <= M^2 1.
struct SpectralWindow {
  double m = 0.0;
  double M = 0.0;
  bool padded = false;  // set when a degenerate window (V = cT) had to be widened

  double m2() const { return m * m; }
  double M2() const { return M * M; }
  double mid() const { return 0.5 * (m2() + M2()); }
  double width() const { return M2() - m2(); }
};

inline constexpr double kDegenerateWidening = 1e-6;
inline constexpr double kDefaultPad = 0.01;

inline SpectralWindow spectral_window(const OperatorPair& pair, double pad = kDefaultPad) {
  if (!(pad >= 0.0 && pad < 1.0)) throw Error(ErrorKind::InvalidParameter, "pad must lie in [0,1)");
  const auto& ev = pair.quotient_eig().eigenvalues;
  const double lo = ev(0);
  const double hi = ev(ev.size() - 1);
  if (!(lo > 0.0)) throw Error(ErrorKind::SingularV, "spectral window needs V invertible");
  SpectralWindow w{std::sqrt(lo), std::sqrt(hi), false};
  if (hi - lo <= 1e-12 * hi) {
    const double r = std::sqrt(0.5 * (lo + hi));
    w.m = r * (1.0 - kDegenerateWidening);
    w.M = r * (1.0 + kDegenerateWidening);
    w.padded = true;
  }
  w.m *= 1.0 - pad;
  w.M *= 1.0 + pad;
  return w;
}

enum class Side { lower, upper };

inline std::string_view to_string(Side s) { return s == Side::lower ? "lower" : "upper"; }

struct BoundReport {
  HermitianMatrix bound;
  Side side = Side::lower;
  double anchor = 0.0;
  std::string equation;
  LoewnerVerdict verdict;  // perspective vs bound in the direction given by side
};

inline json to_json(const BoundReport& r) {
  return json{{"paper_eq", r.equation},
              {"side", std::string(to_string(r.side))},
              {"anchor", r.anchor},
              {"bound", matrix_to_json(r.bound)},
              {"verdict",
               {{"min_eig", r.verdict.min_eig},
                {"tol", r.verdict.tol},
                {"verdict", std::string(to_string(r.verdict.verdict))}}}};
}

namespace detail {

inline void require_convex(const ConvexFunctionSpec& f) {
  if (f.convexity != Convexity::convex)
    throw Error(ErrorKind::InvalidParameter, f.id + " is not convex; bound the negated function instead");
}

inline void require_anchor(const ConvexFunctionSpec& f, double t) {
  if (!f.dom.contains(t))
    throw Error(ErrorKind::AnchorOutOfDomain, "anchor " + format_number(t) + " outside " + f.dom.str());
}

inline void require_window_inside(const ConvexFunctionSpec& f, const SpectralWindow& w) {
  if (!(w.m > 0.0 && w.M > w.m))
    throw Error(ErrorKind::DomainViolation, "window needs 0 < m < M");
  if (!f.dom.contains(w.m2()) || !f.dom.contains(w.M2()))
    throw Error(ErrorKind::DomainViolation, "[m^2, M^2] = [" + format_number(w.m2()) + ", " +
                                                format_number(w.M2()) + "] not inside " + f.dom.str());
}

inline void require_anchor_in_window(double t, const SpectralWindow& w) {
  if (!(t >= w.m2() && t <= w.M2()))
    throw Error(ErrorKind::AnchorOutOfDomain, "anchor " + format_number(t) + " outside [m^2, M^2] = [" +
                                                  format_number(w.m2()) + ", " + format_number(w.M2()) + "]");
}

inline void require_differentiable_convex(const ConvexFunctionSpec& f) {
  require_convex(f);
  if (!f.differentiable()) throw Error(ErrorKind::NotDifferentiable, f.id + " has no continuous derivative");
}

/// f(t)|T|^2 + slope (|V|^2 - t|T|^2)
inline HermitianMatrix tangent_expression(double value, double slope, double t, const OperatorPair& pair) {
  const auto tt = pair.abs2_t();
  const auto vv = pair.abs2_v();
  return value * tt + slope * (vv - t * tt);
}

inline BoundReport lower_report(HermitianMatrix bound, double anchor, std::string eq, const HermitianMatrix& persp,
                                const Tolerance& tol) {
  auto v = loewner_compare(persp, bound, tol);
  return {std::move(bound), Side::lower, anchor, std::move(eq), v};
}

inline BoundReport upper_report(HermitianMatrix bound, double anchor, std::string eq, const HermitianMatrix& persp,
                                const Tolerance& tol) {
  auto v = loewner_compare(bound, persp, tol);
  return {std::move(bound), Side::upper, anchor, std::move(eq), v};
}

inline double norm_sq(const Vec& v) { return v.squaredNorm(); }

inline double quadratic_form(const HermitianMatrix& a, const Vec& x) { return x.dot(a.mat() * x).real(); }

inline double rayleigh_anchor(const OperatorPair& pair, const Vec& x) {
  if (x.size() != pair.n()) throw Error(ErrorKind::DimensionMismatch, "vector length does not match");
  if (x.norm() == 0.0) throw Error(ErrorKind::ZeroVector, "Rayleigh anchor needs x != 0");
  return norm_sq(pair.v().mat() * x) / norm_sq(pair.t().mat() * x);
}

}  // namespace detail

/// ||V x||^2 / ||T x||^2.
inline double rayleigh_anchor(const OperatorPair& pair, const Vec& x) { return detail::rayleigh_anchor(pair, x); }

/// Tangent-line lower bound f(t)|T|^2 + phi(t)(|V|^2 - t|T|^2), phi a subgradient.
inline BoundReport lower_bound_tangent(const ConvexFunctionSpec& f, double t, const OperatorPair& pair,
                                       const Tolerance& tol = {}) {
  detail::require_convex(f);
  detail::require_anchor(f, t);
  const auto persp = quad_perspective(f, pair);
  return detail::lower_report(detail::tangent_expression(f(t), f.subgrad(t), t, pair), t, "e.2.1", persp, tol);
}

/// Tangent at (m^2 + M^2)/2.
inline BoundReport lower_bound_midpoint(const ConvexFunctionSpec& f, const OperatorPair& pair,
                                        const SpectralWindow& win, const Tolerance& tol = {}) {
  detail::require_convex(f);
  detail::require_window_inside(f, win);
  const double t = win.mid();
  detail::require_anchor(f, t);
  const auto persp = quad_perspective(f, pair);
  return detail::lower_report(detail::tangent_expression(f(t), f.subgrad(t), t, pair), t, "e.2.1.a", persp, tol);
}

struct RayleighLowerBound {
  BoundReport report;
  double jensen_lhs = 0.0;  // <P x, x> / ||T x||^2
  double jensen_rhs = 0.0;  // f(||V x||^2 / ||T x||^2)
};

/// Tangent at the Rayleigh anchor ||V x||^2/||T x||^2, with the scalar Jensen pair.
inline RayleighLowerBound lower_bound_rayleigh(const ConvexFunctionSpec& f, const OperatorPair& pair, const Vec& x,
                                               const Tolerance& tol = {}) {
  detail::require_convex(f);
  const double r = detail::rayleigh_anchor(pair, x);
  detail::require_anchor(f, r);
  const auto persp = quad_perspective(f, pair);
  RayleighLowerBound out{
      detail::lower_report(detail::tangent_expression(f(r), f.subgrad(r), r, pair), r, "e.2.6", persp, tol), 0.0,
      0.0};
  out.jensen_lhs = detail::quadratic_form(persp, x) / detail::norm_sq(pair.t().mat() * x);
  out.jensen_rhs = f(r);
  return out;
}

/// Two-vector form: <P y, y> against f(r)||Ty||^2 + phi(r)(||Vy||^2 - r||Ty||^2), r anchored at x.
/// Returns {lhs, rhs}; lhs >= rhs for convex f.
inline std::pair<double, double> rayleigh_two_vector(const ConvexFunctionSpec& f, const OperatorPair& pair,
                                                     const Vec& x, const Vec& y) {
  detail::require_convex(f);
  const double r = detail::rayleigh_anchor(pair, x);
  detail::require_anchor(f, r);
  if (y.size() != pair.n()) throw Error(ErrorKind::DimensionMismatch, "vector length does not match");
  const double ty = detail::norm_sq(pair.t().mat() * y);
  const double vy = detail::norm_sq(pair.v().mat() * y);
  const double lhs = detail::quadratic_form(quad_perspective(f, pair), y);
  const double rhs = f(r) * ty + f.subgrad(r) * (vy - r * ty);
  return {lhs, rhs};
}

/// 2 mean(f)|T|^2 - [f(M^2)(M^2|T|^2 - |V|^2) + f(m^2)(|V|^2 - m^2|T|^2)] / (M^2 - m^2).
inline HermitianMatrix integral_mean_expression(const ConvexFunctionSpec& f, const OperatorPair& pair,
                                                const SpectralWindow& win) {
  const double a = win.m2();
  const double b = win.M2();
  const auto tt = pair.abs2_t();
  const auto vv = pair.abs2_v();
  return 2.0 * integral_mean(f, a, b) * tt - (1.0 / (b - a)) * (f(b) * (b * tt - vv) + f(a) * (vv - a * tt));
}

inline BoundReport lower_bound_integral_mean(const ConvexFunctionSpec& f, const OperatorPair& pair,
                                             const SpectralWindow& win, const Tolerance& tol = {}) {
  detail::require_convex(f);
  detail::require_window_inside(f, win);
  const auto persp = quad_perspective(f, pair);
  return detail::lower_report(integral_mean_expression(f, pair, win), win.mid(), "e.2.9", persp, tol);
}

// ---------------------------------------------------------------------------
// Upper bounds (f convex and continuously differentiable)

struct UpperChain {
  BoundReport first;
  BoundReport second;
  LoewnerVerdict second_over_first;
};

struct UpperMidpointChain {
  BoundReport first;
  BoundReport second;
  BoundReport third;
  LoewnerVerdict second_over_first;
  LoewnerVerdict third_over_second;
};

struct UpperRayleighChain {
  UpperChain chain;
  // scalar form along x
  double scalar_lhs = 0.0;
  double scalar_mid = 0.0;
  double scalar_rhs = 0.0;
};

struct UpperIntegralChain {
  BoundReport first;
  BoundReport second;
  LoewnerVerdict second_over_first;
  HermitianMatrix abs_mean;  // (1/(M^2-m^2)) int T*|X - t|T dt
};

namespace detail {

/// f(t)|T|^2 + P_{f' l} - t P_{f'}
inline HermitianMatrix derivative_expression(const ConvexFunctionSpec& f, double value, double t,
                                             const OperatorPair& pair) {
  return value * pair.abs2_t() + quad_perspective(derivative_times_identity(f), pair) -
         t * quad_perspective(derivative_of(f), pair);
}

inline double gradient_gap(const ConvexFunctionSpec& f, const SpectralWindow& w) {
  return f.deriv(w.M2()) - f.deriv(w.m2());
}

}  // namespace detail

/// Composite Simpson for (1/(b-a)) int_a^b T*|X - t 1|T dt with panel edges at the
/// eigenvalues of X, so the integrand is linear on every panel.
inline HermitianMatrix abs_perspective_mean(const OperatorPair& pair, double a, double b, int nodes = 129) {
  if (!(a < b)) throw Error(ErrorKind::DomainViolation, "abs_perspective_mean needs a < b");
  if (nodes < 3) throw Error(ErrorKind::InvalidParameter, "need at least 3 quadrature nodes");
  std::vector<double> edges{a};
  for (Eigen::Index i = 0; i < pair.quotient_eig().eigenvalues.size(); ++i) {
    const double e = pair.quotient_eig().eigenvalues(i);
    if (e > edges.back() && e < b) edges.push_back(e);
  }
  edges.push_back(b);
  const int panels_total = std::max<int>((nodes - 1) / 2, static_cast<int>(edges.size()) - 1);
  Mat acc = Mat::Zero(pair.n(), pair.n());
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double lo = edges[s];
    const double hi = edges[s + 1];
    const int panels = std::max(1, static_cast<int>(std::lround(panels_total * (hi - lo) / (b - a))));
    const double h = (hi - lo) / (2.0 * panels);
    for (int k = 0; k <= 2 * panels; ++k) {
      const double w = (k == 0 || k == 2 * panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      acc += (w * h / 3.0) * abs_perspective(pair, lo + k * h).mat();
    }
  }
  return HermitianMatrix::symmetrized(acc / (b - a));
}

inline UpperChain upper_bound_chain(const ConvexFunctionSpec& f, double t, const OperatorPair& pair,
                                    const SpectralWindow& win, const Tolerance& tol = {}) {
  detail::require_differentiable_convex(f);
  detail::require_window_inside(f, win);
  detail::require_anchor_in_window(t, win);
  const auto persp = quad_perspective(f, pair);
  auto b1 = detail::derivative_expression(f, f(t), t, pair);
  auto b2 = detail::tangent_expression(f(t), f.deriv(t), t, pair) +
            detail::gradient_gap(f, win) * abs_perspective(pair, t);
  auto chain = loewner_compare(b2, b1, tol);
  return {detail::upper_report(std::move(b1), t, "e.2.11", persp, tol),
          detail::upper_report(std::move(b2), t, "e.2.11", persp, tol), chain};
}

/// Window computed from the pair without padding.
inline UpperChain upper_bound_chain(const ConvexFunctionSpec& f, double t, const OperatorPair& pair) {
  return upper_bound_chain(f, t, pair, spectral_window(pair, 0.0));
}

inline UpperMidpointChain upper_bound_midpoint(const ConvexFunctionSpec& f, const OperatorPair& pair,
                                               const SpectralWindow& win, const Tolerance& tol = {}) {
  auto c = upper_bound_chain(f, win.mid(), pair, win, tol);
  const double t = win.mid();
  const auto persp = quad_perspective(f, pair);
  auto b3 = detail::tangent_expression(f(t), f.deriv(t), t, pair) +
            (0.5 * win.width() * detail::gradient_gap(f, win)) * pair.abs2_t();
  auto v = loewner_compare(b3, c.second.bound, tol);
  c.first.equation = c.second.equation = "e.2.11.a";
  return {std::move(c.first), std::move(c.second), detail::upper_report(std::move(b3), t, "e.2.11.a", persp, tol),
          c.second_over_first, v};
}

inline UpperRayleighChain upper_bound_rayleigh(const ConvexFunctionSpec& f, const OperatorPair& pair, const Vec& x,
                                               const SpectralWindow& win, const Tolerance& tol = {}) {
  const double r = detail::rayleigh_anchor(pair, x);
  auto c = upper_bound_chain(f, r, pair, win, tol);
  c.first.equation = c.second.equation = "e.2.16";
  UpperRayleighChain out{std::move(c), 0.0, 0.0, 0.0};
  const double tx = detail::norm_sq(pair.t().mat() * x);
  out.scalar_lhs = detail::quadratic_form(quad_perspective(f, pair), x);
  out.scalar_mid = f(r) * tx + detail::quadratic_form(quad_perspective(derivative_times_identity(f), pair), x) -
                   r * detail::quadratic_form(quad_perspective(derivative_of(f), pair), x);
  out.scalar_rhs =
      f(r) * tx + detail::gradient_gap(f, win) * detail::quadratic_form(abs_perspective(pair, r), x);
  return out;
}

inline UpperRayleighChain upper_bound_rayleigh(const ConvexFunctionSpec& f, const OperatorPair& pair, const Vec& x) {
  return upper_bound_rayleigh(f, pair, x, spectral_window(pair, 0.0));
}

inline UpperIntegralChain upper_bound_integral_mean(const ConvexFunctionSpec& f, const OperatorPair& pair,
                                                    const SpectralWindow& win, const Tolerance& tol = {},
                                                    int nodes = 129) {
  detail::require_differentiable_convex(f);
  detail::require_window_inside(f, win);
  const auto persp = quad_perspective(f, pair);
  auto u1 = detail::derivative_expression(f, integral_mean(f, win.m2(), win.M2()), win.mid(), pair);
  auto abs_mean = abs_perspective_mean(pair, win.m2(), win.M2(), nodes);
  auto u2 = integral_mean_expression(f, pair, win) + detail::gradient_gap(f, win) * abs_mean;
  auto chain = loewner_compare(u2, u1, tol);
  return {detail::upper_report(std::move(u1), win.mid(), "e.2.18", persp, tol),
          detail::upper_report(std::move(u2), win.mid(), "e.2.18", persp, tol), chain, std::move(abs_mean)};
}

}  // namespace opv
