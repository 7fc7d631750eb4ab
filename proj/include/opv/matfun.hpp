#pragma once

// Dense complex matrices, Hermitian functional calculus and Loewner-order
// comparison. Everything else in opv is built on top of this header.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "opv/error.hpp"

namespace opv {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kDefaultKappaMax = 1e6;

/// Square, finite, n >= 1 complex matrix.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(Mat m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
      throw Error(ErrorKind::InvalidInput, "matrix must be square, got " + std::to_string(m_.rows()) +
                                               "x" + std::to_string(m_.cols()));
    if (m_.rows() < 1) throw Error(ErrorKind::InvalidInput, "matrix dimension must be positive");
    for (Eigen::Index j = 0; j < m_.cols(); ++j)
      for (Eigen::Index i = 0; i < m_.rows(); ++i)
        if (!std::isfinite(m_(i, j).real()) || !std::isfinite(m_(i, j).imag()))
          throw Error(ErrorKind::InvalidInput, "matrix has non-finite entries");
  }

  static ComplexMatrix identity(Eigen::Index n) { return ComplexMatrix(Mat::Identity(n, n)); }
  static ComplexMatrix zero(Eigen::Index n) { return ComplexMatrix(Mat::Zero(n, n)); }
  static ComplexMatrix diagonal(const std::vector<cplx>& d) {
    Mat m = Mat::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
    return ComplexMatrix(std::move(m));
  }

  Eigen::Index n() const noexcept { return m_.rows(); }
  const Mat& mat() const noexcept { return m_; }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  ComplexMatrix adjoint() const { return ComplexMatrix(m_.adjoint()); }

 private:
  Mat m_;
};

inline double max_abs_entry(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermitian_defect(const Mat& m) {
  return max_abs_entry(m - m.adjoint());
}

/// Complex matrix with the symmetry invariant |a_ij - conj(a_ji)| <= 1e-12 (1 + max|a|).
class HermitianMatrix {
 public:
  /// Checks the symmetry invariant and stores the exactly symmetrized matrix.
  explicit HermitianMatrix(const ComplexMatrix& base) : base_(base) {
    const double defect = hermitian_defect(base.mat());
    if (defect > 1e-12 * (1.0 + max_abs_entry(base.mat()))) {
      std::ostringstream os;
      os << "matrix is not Hermitian (max |a_ij - conj(a_ji)| = " << defect << ")";
      throw Error(ErrorKind::NonHermitian, os.str());
    }
    base_ = ComplexMatrix(symmetrize(base.mat()));
  }
  explicit HermitianMatrix(Mat m) : HermitianMatrix(ComplexMatrix(std::move(m))) {}

  /// For results that are Hermitian in exact arithmetic: (X + X*)/2, no check.
  static HermitianMatrix symmetrized(const Mat& m) { return HermitianMatrix(ComplexMatrix(symmetrize(m)), Trusted{}); }

  static HermitianMatrix identity(Eigen::Index n) { return symmetrized(Mat::Identity(n, n)); }
  static HermitianMatrix zero(Eigen::Index n) { return symmetrized(Mat::Zero(n, n)); }
  static HermitianMatrix diagonal(const std::vector<double>& d) {
    Mat m = Mat::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
    return symmetrized(m);
  }

  Eigen::Index n() const noexcept { return base_.n(); }
  const Mat& mat() const noexcept { return base_.mat(); }
  const ComplexMatrix& base() const noexcept { return base_; }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return base_(i, j); }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    check_same(a, b);
    return symmetrized(a.mat() + b.mat());
  }
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
    check_same(a, b);
    return symmetrized(a.mat() - b.mat());
  }
  friend HermitianMatrix operator*(double s, const HermitianMatrix& a) { return symmetrized(s * a.mat()); }
  friend HermitianMatrix operator*(const HermitianMatrix& a, double s) { return s * a; }

 private:
  struct Trusted {};
  HermitianMatrix(ComplexMatrix base, Trusted) : base_(std::move(base)) {}

  static Mat symmetrize(const Mat& m) { return 0.5 * (m + m.adjoint()); }
  static void check_same(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.n() != b.n())
      throw Error(ErrorKind::DimensionMismatch,
                  "dimensions " + std::to_string(a.n()) + " and " + std::to_string(b.n()) + " differ");
  }

  ComplexMatrix base_;
};

inline double frobenius(const Mat& m) { return m.norm(); }

/// ||A - B||_F / max(||A||_F, ||B||_F); zero when both vanish.
inline double relative_frobenius(const Mat& a, const Mat& b) {
  const double scale = std::max(a.norm(), b.norm());
  const double diff = (a - b).norm();
  if (scale == 0.0) return diff;
  return diff / scale;
}

/// Real interval with open/closed ends; the catalog works on (0, inf).
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = true;
  bool hi_open = true;

  static Interval positive() { return {0.0, std::numeric_limits<double>::infinity(), true, true}; }
  static Interval nonnegative() { return {0.0, std::numeric_limits<double>::infinity(), false, true}; }
  static Interval real_line() { return {}; }

  bool contains(double x) const {
    if (std::isnan(x)) return false;
    const bool above = lo_open ? x > lo : x >= lo;
    const bool below = hi_open ? x < hi : x <= hi;
    return above && below;
  }

  std::string str() const {
    std::ostringstream os;
    os << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]");
    return os.str();
  }
};

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;  // ascending
  Mat eigenvectors;             // unitary, columns

  Eigen::Index n() const { return eigenvalues.size(); }

  /// U diag(g(lambda)) U*.
  template <class F>
  Mat map(F&& g) const {
    Eigen::VectorXd d(eigenvalues.size());
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) d(i) = g(eigenvalues(i));
    return eigenvectors * d.asDiagonal() * eigenvectors.adjoint();
  }

  HermitianMatrix reconstruct() const {
    return HermitianMatrix::symmetrized(map([](double x) { return x; }));
  }
};

/// Eigen-decomposition with each eigenvector's largest-magnitude component made real positive.
inline SpectralDecomposition eig_herm(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(a.mat());
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::NumericalFailure, "Hermitian eigensolver did not converge");
  SpectralDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < out.eigenvectors.rows(); ++i) {
      // ties resolved towards the lower index so the choice is reproducible
      const double v = std::abs(out.eigenvectors(i, j));
      if (v > best_abs * (1.0 + 1e-12)) {
        best_abs = v;
        best = i;
      }
    }
    const cplx pivot = out.eigenvectors(best, j);
    if (std::abs(pivot) > 0.0) out.eigenvectors.col(j) *= std::conj(pivot) / std::abs(pivot);
  }
  return out;
}

inline Eigen::VectorXd eigenvalues(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(a.mat(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::NumericalFailure, "Hermitian eigensolver did not converge");
  return solver.eigenvalues();
}

inline double min_eigenvalue(const HermitianMatrix& a) { return eigenvalues(a)(0); }
inline double max_eigenvalue(const HermitianMatrix& a) {
  const auto ev = eigenvalues(a);
  return ev(ev.size() - 1);
}

inline void require_spectrum_in(const Eigen::VectorXd& ev, const Interval& dom) {
  std::vector<double> bad;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (!dom.contains(ev(i))) bad.push_back(ev(i));
  if (!bad.empty()) {
    std::ostringstream os;
    os << "eigenvalues outside " << dom.str() << ":";
    for (double b : bad) os << ' ' << b;
    throw Error(ErrorKind::SpectrumOutOfDomain, os.str());
  }
}

/// f(A) = U diag(f(lambda)) U* for a decomposition that has already been computed.
template <class F>
HermitianMatrix apply_fun(const SpectralDecomposition& d, F&& f, const Interval& dom) {
  require_spectrum_in(d.eigenvalues, dom);
  return HermitianMatrix::symmetrized(d.map(std::forward<F>(f)));
}

/// Continuous functional calculus: every eigenvalue of A must lie in dom.
template <class F>
HermitianMatrix apply_fun(const HermitianMatrix& a, F&& f, const Interval& dom) {
  return apply_fun(eig_herm(a), std::forward<F>(f), dom);
}

/// Sets eigenvalues in [-eps, 0) to zero; eps = 1e-12 * max|lambda|.
inline SpectralDecomposition clamp_psd(SpectralDecomposition d, double rel_eps = 1e-12) {
  const double scale = d.eigenvalues.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i)
    if (d.eigenvalues(i) < 0.0 && d.eigenvalues(i) >= -rel_eps * scale) d.eigenvalues(i) = 0.0;
  return d;
}

/// |U| = sqrt(U* U).
inline HermitianMatrix modulus(const ComplexMatrix& u) {
  const auto gram = HermitianMatrix::symmetrized(u.mat().adjoint() * u.mat());
  auto d = eig_herm(gram);
  // U*U is PSD; anything negative here is rounding
  return HermitianMatrix::symmetrized(d.map([](double x) { return std::sqrt(std::max(x, 0.0)); }));
}

inline Eigen::VectorXd singular_values(const ComplexMatrix& a) {
  Eigen::JacobiSVD<Mat> svd(a.mat());
  return svd.singularValues();
}

/// sigma_max / sigma_min, +inf for singular input.
inline double condition_number(const ComplexMatrix& a) {
  const auto s = singular_values(a);
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

inline void require_well_conditioned(const ComplexMatrix& a, double kappa_max, ErrorKind kind,
                                     const char* name) {
  const double c = condition_number(a);
  if (!(c <= kappa_max)) {
    std::ostringstream os;
    os << name << " has condition number " << c << " > " << kappa_max;
    throw Error(kind, os.str());
  }
}

inline void require_same_dim(Eigen::Index a, Eigen::Index b) {
  if (a != b)
    throw Error(ErrorKind::DimensionMismatch,
                "dimensions " + std::to_string(a) + " and " + std::to_string(b) + " differ");
}

/// Inverse of a matrix that has already passed a condition guard.
inline Mat inverse(const Mat& a) { return a.fullPivLu().inverse(); }

/// |V T^-1|^2 = (T*)^-1 V* V T^-1.
inline HermitianMatrix quotient_square(const ComplexMatrix& t, const ComplexMatrix& v,
                                       double kappa_max = kDefaultKappaMax) {
  require_same_dim(t.n(), v.n());
  require_well_conditioned(t, kappa_max, ErrorKind::SingularT, "T");
  // W = V T^-1, solved as T* W* = V*
  const Mat w_adj = t.mat().adjoint().fullPivLu().solve(v.mat().adjoint());
  return HermitianMatrix::symmetrized(w_adj * w_adj.adjoint());
}

/// T* X T.
inline HermitianMatrix congruence(const ComplexMatrix& t, const HermitianMatrix& x) {
  require_same_dim(t.n(), x.n());
  return HermitianMatrix::symmetrized(t.mat().adjoint() * x.mat() * t.mat());
}

/// |X|^2 = X* X.
inline HermitianMatrix abs2(const ComplexMatrix& x) {
  return HermitianMatrix::symmetrized(x.mat().adjoint() * x.mat());
}

// ---------------------------------------------------------------------------
// Loewner order

enum class Verdict { holds, borderline, fails };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::borderline: return "borderline";
    case Verdict::fails: return "fails";
  }
  return "?";
}

struct LoewnerVerdict {
  double min_eig = 0.0;
  double tol = 0.0;
  Verdict verdict = Verdict::holds;

  bool holds() const { return verdict == Verdict::holds; }
};

/// holds iff min_eig >= -tol, fails iff min_eig < -10 tol, borderline in between.
inline Verdict classify(double min_eig, double tol) {
  if (min_eig >= -tol) return Verdict::holds;
  if (min_eig < -10.0 * tol) return Verdict::fails;
  return Verdict::borderline;
}

inline LoewnerVerdict make_verdict(double min_eig, double tol) {
  return {min_eig, tol, classify(min_eig, tol)};
}

/// tol = atol + rtol * max(||A||_F, ||B||_F).
struct Tolerance {
  double atol = 1e-10;
  double rtol = 1e-9;

  double for_pair(const Mat& a, const Mat& b) const {
    return atol + rtol * std::max(a.norm(), b.norm());
  }
};

/// Checks A >= B, i.e. that A - B is positive semidefinite up to tol.
inline LoewnerVerdict loewner_compare(const HermitianMatrix& a, const HermitianMatrix& b, double tol) {
  require_same_dim(a.n(), b.n());
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "tolerance must be positive");
  return make_verdict(min_eigenvalue(a - b), tol);
}

inline LoewnerVerdict loewner_compare(const HermitianMatrix& a, const HermitianMatrix& b,
                                      const Tolerance& tol = {}) {
  return loewner_compare(a, b, tol.for_pair(a.mat(), b.mat()));
}

/// Smallest eigenvalue of A - B evaluated in extended precision.
inline double min_eig_difference_extended(const Mat& a, const Mat& b) {
  using lcplx = std::complex<long double>;
  using LMat = Eigen::Matrix<lcplx, Eigen::Dynamic, Eigen::Dynamic>;
  LMat d = a.cast<lcplx>() - b.cast<lcplx>();
  d = (d + d.adjoint().eval()) * static_cast<long double>(0.5);
  Eigen::SelfAdjointEigenSolver<LMat> solver(d, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::NumericalFailure, "extended-precision eigensolver did not converge");
  return static_cast<double>(solver.eigenvalues()(0));
}

inline bool is_positive_definite(const HermitianMatrix& a) { return min_eigenvalue(a) > 0.0; }

inline void require_positive_definite(const HermitianMatrix& a, const char* name) {
  const double lo = min_eigenvalue(a);
  if (!(lo > 0.0)) {
    std::ostringstream os;
    os << name << " is not positive definite (min eigenvalue " << lo << ")";
    throw Error(ErrorKind::NotPositiveDefinite, os.str());
  }
}

}  // namespace opv
