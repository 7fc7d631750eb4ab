#pragma once

// Scalar functions with subgradients, derivatives and integral means, plus
// the scalar means L_p, I (identric) and L (logarithmic).

#include <charconv>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "opv/error.hpp"
#include "opv/matfun.hpp"

namespace opv {

using ScalarFn = std::function<double(double)>;

enum class Convexity { convex, concave, unknown };

inline std::string_view to_string(Convexity c) {
  switch (c) {
    case Convexity::convex: return "convex";
    case Convexity::concave: return "concave";
    case Convexity::unknown: return "unknown";
  }
  return "?";
}

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

struct ConvexFunctionSpec {
  std::string id;  // e.g. "pow(2)"
  Interval dom = Interval::positive();
  ScalarFn eval;
  ScalarFn subgrad;      // a selection of the subdifferential
  ScalarFn left_deriv;
  ScalarFn right_deriv;
  ScalarFn deriv;        // empty unless continuously differentiable
  ScalarFn antideriv;    // empty unless a closed form is known
  Convexity convexity = Convexity::convex;

  double operator()(double x) const { return eval(x); }
  bool differentiable() const { return static_cast<bool>(deriv); }
  bool has_antiderivative() const { return static_cast<bool>(antideriv); }
};

using FunctionPtr = std::shared_ptr<const ConvexFunctionSpec>;

namespace detail {

inline ConvexFunctionSpec smooth(std::string id, Convexity c, ScalarFn f, ScalarFn df, ScalarFn big_f) {
  ConvexFunctionSpec s;
  s.id = std::move(id);
  s.eval = std::move(f);
  s.deriv = df;
  s.subgrad = df;
  s.left_deriv = df;
  s.right_deriv = df;
  s.antideriv = std::move(big_f);
  s.convexity = c;
  return s;
}

inline void expect_params(std::string_view id, const std::vector<double>& params, std::size_t count) {
  if (params.size() != count)
    throw Error(ErrorKind::InvalidParameter, std::string(id) + " takes " + std::to_string(count) +
                                                 " parameter(s), got " + std::to_string(params.size()));
  for (double p : params)
    if (!std::isfinite(p)) throw Error(ErrorKind::InvalidParameter, std::string(id) + ": non-finite parameter");
}

}  // namespace detail

/// Catalog ids: pow(p), neg_pow(nu) with nu in [0,1], neg_log, log, tsallis(t), xlogx, identity.
inline ConvexFunctionSpec make_catalog_function(std::string_view id, const std::vector<double>& params = {}) {
  using detail::smooth;
  if (id == "pow") {
    detail::expect_params(id, params, 1);
    const double p = params[0];
    const Convexity c = (p <= 0.0 || p >= 1.0) ? Convexity::convex : Convexity::concave;
    ScalarFn big_f = p == -1.0 ? ScalarFn([](double x) { return std::log(x); })
                               : ScalarFn([p](double x) { return std::pow(x, p + 1.0) / (p + 1.0); });
    return smooth("pow(" + format_number(p) + ")", c, [p](double x) { return std::pow(x, p); },
                  [p](double x) { return p == 0.0 ? 0.0 : p * std::pow(x, p - 1.0); }, big_f);
  }
  if (id == "neg_pow") {
    detail::expect_params(id, params, 1);
    const double nu = params[0];
    if (nu < 0.0 || nu > 1.0)
      throw Error(ErrorKind::InvalidParameter, "neg_pow needs nu in [0,1], got " + format_number(nu));
    return smooth("neg_pow(" + format_number(nu) + ")", Convexity::convex,
                  [nu](double x) { return -std::pow(x, nu); },
                  [nu](double x) { return nu == 0.0 ? 0.0 : -nu * std::pow(x, nu - 1.0); },
                  [nu](double x) { return -std::pow(x, nu + 1.0) / (nu + 1.0); });
  }
  if (id == "neg_log") {
    detail::expect_params(id, params, 0);
    return smooth("neg_log", Convexity::convex, [](double x) { return -std::log(x); },
                  [](double x) { return -1.0 / x; }, [](double x) { return x - x * std::log(x); });
  }
  if (id == "log") {
    detail::expect_params(id, params, 0);
    return smooth("log", Convexity::concave, [](double x) { return std::log(x); },
                  [](double x) { return 1.0 / x; }, [](double x) { return x * std::log(x) - x; });
  }
  if (id == "tsallis") {
    detail::expect_params(id, params, 1);
    const double t = params[0];
    if (t == 0.0) throw Error(ErrorKind::ZeroParameter, "tsallis needs t != 0");
    // second derivative (t - 1) x^(t - 2): convex iff t >= 1
    const Convexity c = t >= 1.0 ? Convexity::convex : Convexity::concave;
    ScalarFn big_f = t == -1.0 ? ScalarFn([](double x) { return x - std::log(x); })
                               : ScalarFn([t](double x) { return (std::pow(x, t + 1.0) / (t + 1.0) - x) / t; });
    return smooth("tsallis(" + format_number(t) + ")", c,
                  [t](double x) { return std::expm1(t * std::log(x)) / t; },
                  [t](double x) { return std::pow(x, t - 1.0); }, big_f);
  }
  if (id == "xlogx") {
    detail::expect_params(id, params, 0);
    return smooth("xlogx", Convexity::convex, [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; },
                  [](double x) { return std::log(x) + 1.0; },
                  [](double x) { return x > 0.0 ? 0.5 * x * x * std::log(x) - 0.25 * x * x : 0.0; });
  }
  if (id == "identity") {
    detail::expect_params(id, params, 0);
    return smooth("identity", Convexity::convex, [](double x) { return x; }, [](double) { return 1.0; },
                  [](double x) { return 0.5 * x * x; });
  }
  throw Error(ErrorKind::UnknownFunction, "unknown catalog function '" + std::string(id) + "'");
}

/// Parses "neg_log", "pow(2)", "tsallis(-0.5)" and builds the function.
inline ConvexFunctionSpec parse_catalog_function(std::string_view text) {
  const auto open = text.find('(');
  if (open == std::string_view::npos) return make_catalog_function(text);
  if (text.back() != ')') throw Error(ErrorKind::InvalidParameter, "malformed function id '" + std::string(text) + "'");
  const std::string_view name = text.substr(0, open);
  std::string_view rest = text.substr(open + 1, text.size() - open - 2);
  std::vector<double> params;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string item(rest.substr(0, comma));
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    double v = 0.0;
    auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size())
      throw Error(ErrorKind::InvalidParameter, "bad parameter '" + item + "' in '" + std::string(text) + "'");
    params.push_back(v);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return make_catalog_function(name, params);
}

/// -f; swaps convex and concave.
inline ConvexFunctionSpec negated(const ConvexFunctionSpec& f) {
  auto neg = [](const ScalarFn& g) -> ScalarFn {
    if (!g) return {};
    return [g](double x) { return -g(x); };
  };
  ConvexFunctionSpec out;
  out.id = "neg[" + f.id + "]";
  out.dom = f.dom;
  out.eval = neg(f.eval);
  out.subgrad = neg(f.subgrad);
  out.left_deriv = neg(f.left_deriv);
  out.right_deriv = neg(f.right_deriv);
  out.deriv = neg(f.deriv);
  out.antideriv = neg(f.antideriv);
  out.convexity = f.convexity == Convexity::convex    ? Convexity::concave
                  : f.convexity == Convexity::concave ? Convexity::convex
                                                      : Convexity::unknown;
  return out;
}

/// s -> Phi'(s), for the upper-bound constructions.
inline ConvexFunctionSpec derivative_of(const ConvexFunctionSpec& f) {
  if (!f.differentiable()) throw Error(ErrorKind::NotDifferentiable, f.id + " has no continuous derivative");
  ConvexFunctionSpec out;
  out.id = "D[" + f.id + "]";
  out.dom = f.dom;
  out.eval = f.deriv;
  out.convexity = Convexity::unknown;
  return out;
}

/// s -> s Phi'(s).
inline ConvexFunctionSpec derivative_times_identity(const ConvexFunctionSpec& f) {
  if (!f.differentiable()) throw Error(ErrorKind::NotDifferentiable, f.id + " has no continuous derivative");
  ConvexFunctionSpec out;
  out.id = "Dl[" + f.id + "]";
  out.dom = f.dom;
  out.eval = [d = f.deriv](double s) { return s * d(s); };
  out.convexity = Convexity::unknown;
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {

inline double simpson_step(const ScalarFn& f, double a, double fa, double b, double fb, double m, double fm,
                           double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson for int_a^b f.
inline double adaptive_simpson(const ScalarFn& f, double a, double b, double abs_tol = 1e-12, int max_depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, abs_tol, max_depth);
}

/// (1/(b-a)) int_a^b f.
inline double integral_mean(const ConvexFunctionSpec& f, double a, double b) {
  if (!(a < b)) throw Error(ErrorKind::DomainViolation, "integral mean needs a < b");
  if (!f.dom.contains(a) || !f.dom.contains(b))
    throw Error(ErrorKind::DomainViolation,
                "[" + format_number(a) + ", " + format_number(b) + "] not inside " + f.dom.str());
  if (f.has_antiderivative()) return (f.antideriv(b) - f.antideriv(a)) / (b - a);
  return adaptive_simpson(f.eval, a, b) / (b - a);
}

// ---------------------------------------------------------------------------
// Scalar means

inline void require_positive_args(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0))
    throw Error(ErrorKind::NonPositiveInput, "means need positive arguments, got " + format_number(x) + ", " +
                                                 format_number(y));
}

inline double log_mean(double x, double y) {
  require_positive_args(x, y);
  if (x == y) return x;
  return (y - x) / (std::log(y) - std::log(x));
}

/// I(x,y) = (1/e) (y^y / x^x)^(1/(y-x)).
inline double identric(double x, double y) {
  require_positive_args(x, y);
  if (x == y) return x;
  return std::exp((y * std::log(y) - x * std::log(x)) / (y - x) - 1.0);
}

/// Generalized logarithmic mean, continuous in p (p = 0 gives I, p = -1 gives L).
inline double p_log_mean(double x, double y, double p) {
  require_positive_args(x, y);
  if (x == y) return x;
  if (std::abs(p) < 1e-6) return identric(x, y);
  if (std::abs(p + 1.0) < 1e-6) return log_mean(x, y);
  return std::pow((std::pow(y, p + 1.0) - std::pow(x, p + 1.0)) / ((p + 1.0) * (y - x)), 1.0 / p);
}

/// T_t(x) = (x^t - 1)/t.
inline double t_fun(double x, double t) {
  if (t == 0.0) throw Error(ErrorKind::ZeroParameter, "T_t needs t != 0");
  if (!(x > 0.0)) throw Error(ErrorKind::NonPositiveInput, "T_t needs x > 0");
  return std::expm1(t * std::log(x)) / t;
}

}  // namespace opv
