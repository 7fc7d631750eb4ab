#pragma once

// Evaluation of expression trees against a Binding of named matrices,
// vectors, scalars and catalog functions.

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "opv/bounds.hpp"
#include "opv/dsl/ast.hpp"
#include "opv/perspectives.hpp"

namespace opv::dsl {

/// Matrix value. `hermitian` marks results that are Hermitian by construction.
struct MatValue {
  Mat m;
  bool hermitian = false;
};

using Value = std::variant<double, MatValue, Vec, FunctionPtr>;

inline std::string_view type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "scalar";
    case 1: return "matrix";
    case 2: return "vector";
    default: return "function";
  }
}

class Binding {
 public:
  void set(const std::string& name, double x) { values_[name] = x; }
  void set(const std::string& name, const ComplexMatrix& m) {
    check_dim(name, m.n());
    const bool herm = hermitian_defect(m.mat()) <= 1e-12 * (1.0 + max_abs_entry(m.mat()));
    values_[name] = MatValue{m.mat(), herm};
  }
  void set(const std::string& name, const HermitianMatrix& m) {
    check_dim(name, m.n());
    values_[name] = MatValue{m.mat(), true};
  }
  void set(const std::string& name, const Vec& v) {
    check_dim(name, v.size());
    values_[name] = v;
  }
  void set(const std::string& name, FunctionPtr f) { values_[name] = std::move(f); }
  void set(const std::string& name, const ConvexFunctionSpec& f) {
    values_[name] = std::make_shared<const ConvexFunctionSpec>(f);
  }

  const Value* find(std::string_view name) const {
    auto it = values_.find(name);
    return it == values_.end() ? nullptr : &it->second;
  }
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::optional<Eigen::Index> dim() const { return dim_; }
  const std::map<std::string, Value, std::less<>>& values() const { return values_; }

 private:
  void check_dim(const std::string& name, Eigen::Index n) {
    if (dim_ && *dim_ != n) {
      // rebinding the only dimensioned name may change the dimension
      auto it = values_.find(name);
      const bool sole = it != values_.end() && dimensioned_count() == 1 &&
                        (std::holds_alternative<MatValue>(it->second) || std::holds_alternative<Vec>(it->second));
      if (!sole)
        throw Error(ErrorKind::DimensionMismatch, "binding '" + name + "' has dimension " + std::to_string(n) +
                                                      ", expected " + std::to_string(*dim_));
    }
    dim_ = n;
  }
  std::size_t dimensioned_count() const {
    std::size_t k = 0;
    for (const auto& [_, v] : values_)
      if (std::holds_alternative<MatValue>(v) || std::holds_alternative<Vec>(v)) ++k;
    return k;
  }

  std::map<std::string, Value, std::less<>> values_;
  std::optional<Eigen::Index> dim_;
};

/// Operation error annotated with the position of the failing node.
class EvalError : public Error {
 public:
  EvalError(ErrorKind kind, SourcePos pos, const std::string& what)
      : Error(kind, std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + what), pos_(pos) {}
  const SourcePos& pos() const noexcept { return pos_; }

 private:
  SourcePos pos_;
};

using EvalResult = std::variant<HermitianMatrix, double, LoewnerVerdict>;

inline HermitianMatrix as_hermitian(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return HermitianMatrix::diagonal({*d});
  if (const auto* m = std::get_if<MatValue>(&v))
    return m->hermitian ? HermitianMatrix::symmetrized(m->m) : HermitianMatrix(ComplexMatrix(m->m));
  throw Error(ErrorKind::TypeError, "expected a matrix or scalar, got a " + std::string(type_name(v)));
}

/// lhs REL rhs in the Loewner order; "==" is two-sided.
inline LoewnerVerdict relation_verdict(const HermitianMatrix& lhs, Rel rel, const HermitianMatrix& rhs,
                                       const Tolerance& tol = {}) {
  switch (rel) {
    case Rel::le: return loewner_compare(rhs, lhs, tol);
    case Rel::ge: return loewner_compare(lhs, rhs, tol);
    case Rel::eq: {
      const auto a = loewner_compare(lhs, rhs, tol);
      const auto b = loewner_compare(rhs, lhs, tol);
      return a.min_eig <= b.min_eig ? a : b;
    }
  }
  return {};
}

class Evaluator {
 public:
  explicit Evaluator(const Binding& env, double kappa_max = kDefaultKappaMax) : env_(env), kappa_(kappa_max) {}

  Value value(const Node& n) {
    try {
      return value_impl(n);
    } catch (const EvalError&) {
      throw;
    } catch (const Error& e) {
      throw EvalError(e.kind(), n.pos, e.detail());
    }
  }

  EvalResult evaluate(const Node& n, const Tolerance& tol = {}) {
    if (n.kind == NodeKind::relation) {
      const auto lhs = as_hermitian_at(value(*n.children[0]), *n.children[0]);
      const auto rhs = as_hermitian_at(value(*n.children[1]), *n.children[1]);
      try {
        return relation_verdict(lhs, n.rel, rhs, tol);
      } catch (const Error& e) {
        throw EvalError(e.kind(), n.pos, e.detail());
      }
    }
    auto v = value(n);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    return as_hermitian_at(v, n);
  }

  /// T, V pair with its quotient decomposition, reused across calls on the same operands.
  const OperatorPair& pair(const Mat& t, const Mat& v) {
    for (const auto& p : pairs_)
      if (p.t().mat() == t && p.v().mat() == v) return p;
    pairs_.emplace_back(ComplexMatrix(t), ComplexMatrix(v), kappa_);
    return pairs_.back();
  }

 private:
  using Args = std::vector<Value>;
  using Builtin = std::function<Value(Evaluator&, const Node&, Args&)>;

  static HermitianMatrix as_hermitian_at(const Value& v, const Node& n) {
    try {
      return as_hermitian(v);
    } catch (const Error& e) {
      throw EvalError(e.kind(), n.pos, e.detail());
    }
  }

  static double scalar(const Args& a, std::size_t i, const Node& call) {
    if (const auto* d = std::get_if<double>(&a[i])) return *d;
    throw bad_arg(a, i, call, "scalar");
  }
  static const Mat& matrix(const Args& a, std::size_t i, const Node& call) {
    if (const auto* m = std::get_if<MatValue>(&a[i])) return m->m;
    throw bad_arg(a, i, call, "matrix");
  }
  static HermitianMatrix herm(const Args& a, std::size_t i, const Node& call) {
    if (const auto* m = std::get_if<MatValue>(&a[i])) {
      if (m->hermitian) return HermitianMatrix::symmetrized(m->m);
      return HermitianMatrix(ComplexMatrix(m->m));
    }
    throw bad_arg(a, i, call, "Hermitian matrix");
  }
  static const Vec& vector(const Args& a, std::size_t i, const Node& call) {
    if (const auto* v = std::get_if<Vec>(&a[i])) return *v;
    throw bad_arg(a, i, call, "vector");
  }
  static const ConvexFunctionSpec& function(const Args& a, std::size_t i, const Node& call) {
    if (const auto* f = std::get_if<FunctionPtr>(&a[i])) return **f;
    throw bad_arg(a, i, call, "function");
  }
  static EvalError bad_arg(const Args& a, std::size_t i, const Node& call, std::string_view want) {
    return EvalError(ErrorKind::TypeError, call.children[i]->pos,
                     "argument " + std::to_string(i + 1) + " of " + call.text + " must be a " + std::string(want) +
                         ", got a " + std::string(type_name(a[i])));
  }

  static Value herm_value(const HermitianMatrix& h) { return MatValue{h.mat(), true}; }
  static Value fn_value(ConvexFunctionSpec f) { return std::make_shared<const ConvexFunctionSpec>(std::move(f)); }

  static const std::map<std::string, Builtin, std::less<>>& builtins() {
    static const std::map<std::string, Builtin, std::less<>> table{
        {"abs2", [](Evaluator&, const Node& c, Args& a) { return herm_value(abs2(ComplexMatrix(matrix(a, 0, c)))); }},
        {"nabla",
         [](Evaluator&, const Node& c, Args& a) {
           return herm_value(arith_mean(herm(a, 0, c), herm(a, 1, c), scalar(a, 2, c)));
         }},
        {"sharp",
         [](Evaluator&, const Node& c, Args& a) {
           return herm_value(geo_mean(herm(a, 0, c), herm(a, 1, c), scalar(a, 2, c)));
         }},
        {"bang",
         [](Evaluator&, const Node& c, Args& a) {
           return herm_value(harm_mean(herm(a, 0, c), herm(a, 1, c), scalar(a, 2, c)));
         }},
        {"geoQ",
         [](Evaluator& ev, const Node& c, Args& a) {
           return herm_value(quad_geo_mean(ev.pair(matrix(a, 0, c), matrix(a, 1, c)), scalar(a, 2, c)));
         }},
        {"geoQmod",
         [](Evaluator& ev, const Node& c, Args& a) {
           return herm_value(
               quad_geo_mean_modulus_form(ev.pair(matrix(a, 0, c), matrix(a, 1, c)), scalar(a, 2, c)));
         }},
        {"S", [](Evaluator&, const Node& c, Args& a) { return herm_value(rel_entropy(herm(a, 0, c), herm(a, 1, c))); }},
        {"entQ",
         [](Evaluator& ev, const Node& c, Args& a) {
           return herm_value(quad_rel_entropy(ev.pair(matrix(a, 0, c), matrix(a, 1, c))));
         }},
        {"tsallisQ",
         [](Evaluator& ev, const Node& c, Args& a) {
           return herm_value(quad_tsallis(ev.pair(matrix(a, 0, c), matrix(a, 1, c)), scalar(a, 2, c)));
         }},
        {"persp",
         [](Evaluator&, const Node& c, Args& a) {
           return herm_value(perspective(function(a, 0, c), herm(a, 1, c), herm(a, 2, c)));
         }},
        {"perspQ",
         [](Evaluator& ev, const Node& c, Args& a) {
           return herm_value(quad_perspective(function(a, 0, c), ev.pair(matrix(a, 1, c), matrix(a, 2, c))));
         }},
        {"absPersp",
         [](Evaluator& ev, const Node& c, Args& a) {
           return herm_value(abs_perspective(ev.pair(matrix(a, 0, c), matrix(a, 1, c)), scalar(a, 2, c)));
         }},
        {"absPerspMean",
         [](Evaluator& ev, const Node& c, Args& a) {
           return herm_value(abs_perspective_mean(ev.pair(matrix(a, 0, c), matrix(a, 1, c)), scalar(a, 2, c),
                                                  scalar(a, 3, c)));
         }},
        {"Lp",
         [](Evaluator&, const Node& c, Args& a) -> Value {
           return p_log_mean(scalar(a, 0, c), scalar(a, 1, c), scalar(a, 2, c));
         }},
        {"identric",
         [](Evaluator&, const Node& c, Args& a) -> Value { return identric(scalar(a, 0, c), scalar(a, 1, c)); }},
        {"logmean",
         [](Evaluator&, const Node& c, Args& a) -> Value { return log_mean(scalar(a, 0, c), scalar(a, 1, c)); }},
        {"pow",
         [](Evaluator&, const Node& c, Args& a) { return fn_value(make_catalog_function("pow", {scalar(a, 0, c)})); }},
        {"neg_pow",
         [](Evaluator&, const Node& c, Args& a) {
           return fn_value(make_catalog_function("neg_pow", {scalar(a, 0, c)}));
         }},
        {"tsallis",
         [](Evaluator&, const Node& c, Args& a) {
           return fn_value(make_catalog_function("tsallis", {scalar(a, 0, c)}));
         }},
        {"D", [](Evaluator&, const Node& c, Args& a) { return fn_value(derivative_of(function(a, 0, c))); }},
        {"Dl",
         [](Evaluator&, const Node& c, Args& a) { return fn_value(derivative_times_identity(function(a, 0, c))); }},
        {"fn",
         [](Evaluator&, const Node& c, Args& a) -> Value {
           const auto& f = function(a, 0, c);
           if (const auto* s = std::get_if<double>(&a[1])) {
             if (!f.dom.contains(*s))
               throw Error(ErrorKind::DomainViolation, format_number(*s) + " is outside " + f.dom.str());
             return f(*s);
           }
           return herm_value(apply_fun(herm(a, 1, c), f.eval, f.dom));
         }},
        {"dfn",
         [](Evaluator&, const Node& c, Args& a) -> Value {
           const auto& f = function(a, 0, c);
           if (!f.subgrad) throw Error(ErrorKind::NotDifferentiable, f.id + " has no subgradient");
           if (const auto* s = std::get_if<double>(&a[1])) {
             if (!f.dom.contains(*s))
               throw Error(ErrorKind::DomainViolation, format_number(*s) + " is outside " + f.dom.str());
             return f.subgrad(*s);
           }
           return herm_value(apply_fun(herm(a, 1, c), f.subgrad, f.dom));
         }},
        {"imean",
         [](Evaluator&, const Node& c, Args& a) -> Value {
           return integral_mean(function(a, 0, c), scalar(a, 1, c), scalar(a, 2, c));
         }},
        {"rq",
         [](Evaluator& ev, const Node& c, Args& a) -> Value {
           return rayleigh_anchor(ev.pair(matrix(a, 0, c), matrix(a, 1, c)), vector(a, 2, c));
         }},
        {"ip",
         [](Evaluator&, const Node& c, Args& a) -> Value {
           const auto h = herm(a, 0, c);
           const auto& x = vector(a, 1, c);
           if (x.size() != h.n()) throw Error(ErrorKind::DimensionMismatch, "vector length does not match");
           return x.dot(h.mat() * x).real();
         }},
        {"adj",
         [](Evaluator&, const Node& c, Args& a) -> Value {
           const auto* m = std::get_if<MatValue>(&a[0]);
           if (!m) throw bad_arg(a, 0, c, "matrix");
           return MatValue{m->m.adjoint(), m->hermitian};
         }},
        {"cong",
         [](Evaluator&, const Node& c, Args& a) {
           const ComplexMatrix t(matrix(a, 0, c));
           const auto x = herm(a, 1, c);
           require_same_dim(t.n(), x.n());
           return herm_value(congruence(t, x));
         }},
    };
    return table;
  }

  static Value arith(const Node& n, const Value& l, const Value& r) {
    const bool add = n.kind == NodeKind::add;
    const auto* ld = std::get_if<double>(&l);
    const auto* rd = std::get_if<double>(&r);
    if (ld && rd) return add ? *ld + *rd : *ld - *rd;
    const auto* lm = std::get_if<MatValue>(&l);
    const auto* rm = std::get_if<MatValue>(&r);
    if (lm && rm) {
      require_same_dim(lm->m.rows(), rm->m.rows());
      const bool h = lm->hermitian && rm->hermitian;
      if (h) {
        // same arithmetic as HermitianMatrix::operator+/-
        const auto a = HermitianMatrix::symmetrized(lm->m);
        const auto b = HermitianMatrix::symmetrized(rm->m);
        return herm_value(add ? a + b : a - b);
      }
      return MatValue{add ? Mat(lm->m + rm->m) : Mat(lm->m - rm->m), false};
    }
    throw Error(ErrorKind::TypeError, std::string("cannot ") + (add ? "add " : "subtract ") +
                                          std::string(type_name(l)) + " and " + std::string(type_name(r)) +
                                          " (scalars are never lifted to matrices; write c * abs2(T))");
  }

  static Value multiply(const Value& l, const Value& r) {
    const auto* ld = std::get_if<double>(&l);
    const auto* rd = std::get_if<double>(&r);
    if (ld && rd) return *ld * *rd;
    if (ld) {
      if (const auto* m = std::get_if<MatValue>(&r)) {
        if (m->hermitian) return herm_value(*ld * HermitianMatrix::symmetrized(m->m));
        return MatValue{*ld * m->m, false};
      }
      if (const auto* v = std::get_if<Vec>(&r)) return Vec(*ld * *v);
    }
    if (rd) {
      if (const auto* m = std::get_if<MatValue>(&l)) {
        if (m->hermitian) return herm_value(*rd * HermitianMatrix::symmetrized(m->m));
        return MatValue{*rd * m->m, false};
      }
      if (const auto* v = std::get_if<Vec>(&l)) return Vec(*rd * *v);
    }
    throw Error(ErrorKind::TypeError, "'*' needs a scalar operand, got " + std::string(type_name(l)) + " * " +
                                          std::string(type_name(r)));
  }

  Value invert(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) {
      if (*d == 0.0) throw Error(ErrorKind::DomainViolation, "inverse of zero");
      return 1.0 / *d;
    }
    if (const auto* m = std::get_if<MatValue>(&v)) {
      const ComplexMatrix cm(m->m);
      // operands are usually squares such as abs2(V), whose condition number is kappa^2
      require_well_conditioned(cm, kappa_ * kappa_, ErrorKind::NumericalFailure, "inv operand");
      Mat inv = inverse(m->m);
      if (m->hermitian) return herm_value(HermitianMatrix::symmetrized(0.5 * (inv + inv.adjoint())));
      return MatValue{std::move(inv), false};
    }
    throw Error(ErrorKind::TypeError, "cannot invert a " + std::string(type_name(v)));
  }

  Value lookup(const Node& n) const {
    if (const auto* v = env_.find(n.text)) return *v;
    if (n.text == "neg_log" || n.text == "log" || n.text == "xlogx" || n.text == "identity")
      return fn_value(make_catalog_function(n.text));
    throw Error(ErrorKind::UnboundName, "name '" + n.text + "' is not bound");
  }

  Value value_impl(const Node& n) {
    switch (n.kind) {
      case NodeKind::number: return n.value;
      case NodeKind::name: return lookup(n);
      case NodeKind::add:
      case NodeKind::sub: {
        auto l = value(*n.children[0]);
        auto r = value(*n.children[1]);
        return arith(n, l, r);
      }
      case NodeKind::mul: {
        auto l = value(*n.children[0]);
        auto r = value(*n.children[1]);
        return multiply(l, r);
      }
      case NodeKind::inverse: return invert(value(*n.children[0]));
      case NodeKind::call: {
        Args args;
        args.reserve(n.children.size());
        for (const auto& c : n.children) args.push_back(value(*c));
        auto it = builtins().find(n.text);
        if (it == builtins().end()) throw Error(ErrorKind::UnknownFunction, "unknown function '" + n.text + "'");
        return it->second(*this, n, args);
      }
      case NodeKind::relation:
        throw Error(ErrorKind::TypeError, "relations may only appear at the root");
    }
    throw Error(ErrorKind::TypeError, "bad node");
  }

  const Binding& env_;
  double kappa_;
  std::deque<OperatorPair> pairs_;
};

inline EvalResult evaluate(const Node& ast, const Binding& env, const Tolerance& tol = {},
                           double kappa_max = kDefaultKappaMax) {
  Evaluator ev(env, kappa_max);
  return ev.evaluate(ast, tol);
}

inline EvalResult evaluate(std::string_view src, const Binding& env, const Tolerance& tol = {},
                           double kappa_max = kDefaultKappaMax) {
  return evaluate(*parse(src), env, tol, kappa_max);
}

}  // namespace opv::dsl
