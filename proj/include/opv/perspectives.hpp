#pragma once

// Classical and quadratic operator perspectives, the weighted arithmetic,
// geometric and harmonic means, and the relative/Tsallis operator entropies.

#include <cmath>
#include <memory>
#include <sstream>
#include <utility>

#include "opv/funcatalog.hpp"
#include "opv/matfun.hpp"

namespace opv {

/// (T, V) with T invertible. Holds X = |V T^-1|^2 and its spectral decomposition.
class OperatorPair {
 public:
  OperatorPair(ComplexMatrix t, ComplexMatrix v, double kappa_max = kDefaultKappaMax)
      : t_(std::move(t)), v_(std::move(v)), kappa_max_(kappa_max),
        quotient_(quotient_square(t_, v_, kappa_max)), quotient_eig_(eig_herm(quotient_)) {}

  const ComplexMatrix& t() const noexcept { return t_; }
  const ComplexMatrix& v() const noexcept { return v_; }
  Eigen::Index n() const noexcept { return t_.n(); }
  double kappa_max() const noexcept { return kappa_max_; }

  /// |V T^-1|^2
  const HermitianMatrix& quotient() const noexcept { return quotient_; }
  const SpectralDecomposition& quotient_eig() const noexcept { return quotient_eig_; }

  HermitianMatrix abs2_t() const { return abs2(t_); }
  HermitianMatrix abs2_v() const { return abs2(v_); }

  void require_v_invertible() const { require_well_conditioned(v_, kappa_max_, ErrorKind::SingularV, "V"); }

 private:
  ComplexMatrix t_;
  ComplexMatrix v_;
  double kappa_max_;
  HermitianMatrix quotient_;
  SpectralDecomposition quotient_eig_;
};

inline void require_unit_weight(double nu) {
  if (!(nu >= 0.0 && nu <= 1.0))
    throw Error(ErrorKind::WeightOutOfRange, "weight must lie in [0,1], got " + format_number(nu));
}

namespace detail {

/// x^p with 0^p = 0 for p > 0 and x^0 = 1.
inline double power_psd(double x, double p) {
  if (p == 0.0) return 1.0;
  if (x == 0.0) return p > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(x, p);
}

struct SqrtPair {
  Mat sqrt;
  Mat inv_sqrt;
};

inline SqrtPair sqrt_and_inverse(const HermitianMatrix& a, const char* name) {
  auto d = eig_herm(a);
  if (!(d.eigenvalues(0) > 0.0)) {
    std::ostringstream os;
    os << name << " is not positive definite (min eigenvalue " << d.eigenvalues(0) << ")";
    throw Error(ErrorKind::NotPositiveDefinite, os.str());
  }
  return {d.map([](double x) { return std::sqrt(x); }), d.map([](double x) { return 1.0 / std::sqrt(x); })};
}

inline HermitianMatrix hermitian_power(const HermitianMatrix& x, double p) {
  auto d = clamp_psd(eig_herm(x));
  const Interval dom = p > 0.0 || p == 0.0 ? Interval::nonnegative() : Interval::positive();
  return apply_fun(d, [p](double s) { return power_psd(s, p); }, dom);
}

}  // namespace detail

/// P_f(B, A) = A^1/2 f(A^-1/2 B A^-1/2) A^1/2 for A positive definite.
inline HermitianMatrix perspective(const ConvexFunctionSpec& f, const HermitianMatrix& b, const HermitianMatrix& a) {
  require_same_dim(a.n(), b.n());
  const auto r = detail::sqrt_and_inverse(a, "A");
  const auto inner = HermitianMatrix::symmetrized(r.inv_sqrt * b.mat() * r.inv_sqrt);
  const auto fx = apply_fun(inner, f.eval, f.dom);
  return HermitianMatrix::symmetrized(r.sqrt * fx.mat() * r.sqrt);
}

/// T* f(|V T^-1|^2) T.
inline HermitianMatrix quad_perspective(const ConvexFunctionSpec& f, const OperatorPair& pair) {
  return congruence(pair.t(), apply_fun(pair.quotient_eig(), f.eval, f.dom));
}

/// (1 - nu) A + nu B.
inline HermitianMatrix arith_mean(const HermitianMatrix& a, const HermitianMatrix& b, double nu) {
  require_unit_weight(nu);
  require_same_dim(a.n(), b.n());
  return HermitianMatrix::symmetrized((1.0 - nu) * a.mat() + nu * b.mat());
}

/// A^1/2 (A^-1/2 B A^-1/2)^nu A^1/2.
inline HermitianMatrix geo_mean(const HermitianMatrix& a, const HermitianMatrix& b, double nu) {
  require_unit_weight(nu);
  require_same_dim(a.n(), b.n());
  const auto r = detail::sqrt_and_inverse(a, "A");
  const auto inner = HermitianMatrix::symmetrized(r.inv_sqrt * b.mat() * r.inv_sqrt);
  const auto p = detail::hermitian_power(inner, nu);
  return HermitianMatrix::symmetrized(r.sqrt * p.mat() * r.sqrt);
}

/// ((1 - nu) A^-1 + nu B^-1)^-1.
inline HermitianMatrix harm_mean(const HermitianMatrix& a, const HermitianMatrix& b, double nu) {
  require_unit_weight(nu);
  require_same_dim(a.n(), b.n());
  require_positive_definite(a, "A");
  require_positive_definite(b, "B");
  const Mat s = (1.0 - nu) * inverse(a.mat()) + nu * inverse(b.mat());
  return HermitianMatrix::symmetrized(inverse(0.5 * (s + s.adjoint())));
}

/// T S_nu V = T* |V T^-1|^(2 nu) T. Negative weights need V invertible.
inline HermitianMatrix quad_geo_mean(const OperatorPair& pair, double nu) {
  if (!std::isfinite(nu)) throw Error(ErrorKind::InvalidParameter, "weight must be finite");
  if (nu < 0.0) pair.require_v_invertible();
  const auto d = clamp_psd(pair.quotient_eig());
  const Interval dom = nu >= 0.0 ? Interval::nonnegative() : Interval::positive();
  return congruence(pair.t(), apply_fun(d, [nu](double s) { return detail::power_psd(s, nu); }, dom));
}

/// | |V T^-1|^nu T |^2 evaluated literally: explicit quotient, modulus, power, product.
inline HermitianMatrix quad_geo_mean_modulus_form(const OperatorPair& pair, double nu) {
  if (nu < 0.0) pair.require_v_invertible();
  const ComplexMatrix w(pair.v().mat() * inverse(pair.t().mat()));
  const auto mod = modulus(w);
  const auto mod_pow = detail::hermitian_power(mod, nu);
  return abs2(ComplexMatrix(mod_pow.mat() * pair.t().mat()));
}

/// S(A|B) = A^1/2 ln(A^-1/2 B A^-1/2) A^1/2.
inline HermitianMatrix rel_entropy(const HermitianMatrix& a, const HermitianMatrix& b) {
  require_same_dim(a.n(), b.n());
  require_positive_definite(b, "B");
  const auto r = detail::sqrt_and_inverse(a, "A");
  const auto inner = HermitianMatrix::symmetrized(r.inv_sqrt * b.mat() * r.inv_sqrt);
  const auto l = apply_fun(inner, [](double s) { return std::log(s); }, Interval::positive());
  return HermitianMatrix::symmetrized(r.sqrt * l.mat() * r.sqrt);
}

/// T* ln(|V T^-1|^2) T.
inline HermitianMatrix quad_rel_entropy(const OperatorPair& pair) {
  pair.require_v_invertible();
  return congruence(pair.t(),
                    apply_fun(pair.quotient_eig(), [](double s) { return std::log(s); }, Interval::positive()));
}

/// T* T_t(|V T^-1|^2) T.
inline HermitianMatrix quad_tsallis(const OperatorPair& pair, double t) {
  if (t == 0.0) throw Error(ErrorKind::ZeroParameter, "Tsallis entropy needs t != 0");
  pair.require_v_invertible();
  return congruence(pair.t(),
                    apply_fun(pair.quotient_eig(), [t](double s) { return std::expm1(t * std::log(s)) / t; },
                              Interval::positive()));
}

/// (T S_t V - |T|^2) / t.
inline HermitianMatrix quad_tsallis_via_mean(const OperatorPair& pair, double t) {
  if (t == 0.0) throw Error(ErrorKind::ZeroParameter, "Tsallis entropy needs t != 0");
  pair.require_v_invertible();
  return (1.0 / t) * (quad_geo_mean(pair, t) - pair.abs2_t());
}

/// Product form of the negative-order Tsallis entropy for t > 0:
/// entropy_t (T S_t V)^-1 |T|^2, a general matrix in floating point.
inline Mat tsallis_negative_product_form(const OperatorPair& pair, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidParameter, "product form needs t > 0");
  const auto ent = quad_tsallis(pair, t);
  const auto mean = quad_geo_mean(pair, t);
  return ent.mat() * inverse(mean.mat()) * pair.abs2_t().mat();
}

/// T* | |V T^-1|^2 - t 1 | T.
inline HermitianMatrix abs_perspective(const OperatorPair& pair, double t) {
  return congruence(pair.t(), apply_fun(pair.quotient_eig(), [t](double s) { return std::abs(s - t); },
                                        Interval::real_line()));
}

/// T* | (T*)^-1 (|V|^2 - t |T|^2) T^-1 | T, the inner matrix formed explicitly.
inline HermitianMatrix abs_perspective_inner_form(const OperatorPair& pair, double t) {
  const Mat t_inv = inverse(pair.t().mat());
  const Mat inner = t_inv.adjoint() * (pair.abs2_v().mat() - t * pair.abs2_t().mat()) * t_inv;
  const auto mod = modulus(ComplexMatrix(0.5 * (inner + inner.adjoint())));
  return congruence(pair.t(), mod);
}

}  // namespace opv
