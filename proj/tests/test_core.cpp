#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "opv/opv.hpp"

using namespace opv;
using std::numbers::e;

namespace {

ComplexMatrix cm(std::initializer_list<std::initializer_list<double>> rows) {
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return ComplexMatrix(m);
}

HermitianMatrix hd(std::vector<double> d) { return HermitianMatrix::diagonal(d); }
ComplexMatrix cd(std::vector<double> d) {
  std::vector<cplx> c(d.begin(), d.end());
  return ComplexMatrix::diagonal(c);
}

void expect_near(const Mat& a, const Mat& b, double tol = 1e-12) {
  ASSERT_EQ(a.rows(), b.rows());
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), tol) << "got\n" << a << "\nwant\n" << b;
}

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& err) {
    return err.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::InvalidInput;
}

OperatorPair diag_pair(std::vector<double> t, std::vector<double> v) { return OperatorPair(cd(t), cd(v)); }

}  // namespace

// ---------------------------------------------------------------------------
// matfun

TEST(Matfun, EigenvaluesOfSmallMatrices) {
  const auto id = eig_herm(HermitianMatrix::identity(3));
  expect_near(id.eigenvalues, Eigen::Vector3d(1, 1, 1));
  expect_near(id.eigenvectors.adjoint() * id.eigenvectors, Mat::Identity(3, 3));
  expect_near(eigenvalues(hd({3, 1})), Eigen::Vector2d(1, 3));
  expect_near(eigenvalues(HermitianMatrix(cm({{2, 1}, {1, 2}}).mat())), Eigen::Vector2d(1, 3));
}

TEST(Matfun, RejectsNonHermitianInput) {
  EXPECT_EQ(kind_of([] { HermitianMatrix h(cm({{1, 2}, {0, 1}}).mat()); }), ErrorKind::NonHermitian);
}

TEST(Matfun, ApplyFunExamples) {
  const auto a = HermitianMatrix(cm({{2, 1}, {1, 2}}).mat());
  expect_near(apply_fun(a, [](double x) { return x; }, Interval::real_line()).mat(), a.mat());
  expect_near(apply_fun(hd({1, e * e}), [](double x) { return std::log(x); }, Interval::positive()).mat(),
              hd({0, 2}).mat());
  const auto r = apply_fun(a, [](double x) { return std::sqrt(x); }, Interval::positive());
  expect_near(eigenvalues(r), Eigen::Vector2d(1, std::sqrt(3.0)));
  expect_near((r.mat() * r.mat()), a.mat());
  EXPECT_EQ(kind_of([] { apply_fun(hd({-1, 2}), [](double x) { return std::log(x); }, Interval::positive()); }),
            ErrorKind::SpectrumOutOfDomain);
}

TEST(Matfun, ApplyFunComposes) {
  verify::Engine rng(3);
  for (Eigen::Index n : {1, 3, 6}) {
    const auto a = verify::gen_pd(n, rng);
    const auto sq = apply_fun(a, [](double x) { return x * x; }, Interval::positive());
    const auto twice = apply_fun(sq, [](double x) { return std::log(x); }, Interval::positive());
    const auto once = apply_fun(a, [](double x) { return std::log(x * x); }, Interval::positive());
    EXPECT_LE(relative_frobenius(twice.mat(), once.mat()), 1e-9);
  }
}

TEST(Matfun, ModulusExamples) {
  expect_near(modulus(cm({{0, -1}, {1, 0}})).mat(), Mat::Identity(2, 2));
  expect_near(modulus(cd({-3})).mat(), hd({3}).mat());
  expect_near(modulus(cm({{3, 0}, {4, 0}})).mat(), hd({5, 0}).mat());
}

TEST(Matfun, ModulusSquaresToGram) {
  verify::Engine rng(4);
  for (Eigen::Index n : {1, 2, 5}) {
    const auto u = verify::gen_invertible(n, rng);
    const auto m = modulus(u).mat();
    EXPECT_LE(relative_frobenius(m * m, u.mat().adjoint() * u.mat()), 1e-10);
    const auto p = verify::gen_pd(n, rng);
    EXPECT_LE(relative_frobenius(modulus(ComplexMatrix(p.mat())).mat(), p.mat()), 1e-10);
  }
}

TEST(Matfun, QuotientSquareExamples) {
  const auto v = cm({{1, 2}, {0, 3}});
  expect_near(quotient_square(ComplexMatrix::identity(2), v).mat(), v.mat().adjoint() * v.mat());
  expect_near(quotient_square(cd({2}), cd({3})).mat(), hd({9.0 / 4.0}).mat());
  expect_near(quotient_square(v, v).mat(), Mat::Identity(2, 2));
  EXPECT_EQ(kind_of([] { quotient_square(cd({1, 0}), cd({1, 1})); }), ErrorKind::SingularT);
}

TEST(Matfun, QuotientSpectrumMatchesVectorBounds) {
  // m||Tx|| <= ||Vx|| <= M||Tx|| for all x  <=>  m <= |VT^-1| <= M
  verify::Engine rng(5);
  for (Eigen::Index n : {2, 3, 5}) {
    const OperatorPair pair(verify::gen_invertible(n, rng), verify::gen_invertible(n, rng));
    const auto w = spectral_window(pair, 0.0);
    const auto q = pair.quotient();
    for (double s : {0.99, 1.01}) {
      const double lo = s > 1 ? w.m / s : w.m * s;  // inflated window
      const double hi = s > 1 ? w.M * s : w.M / s;
      const double lo_in = s > 1 ? w.m * s : w.m / s;  // shrunk window
      const double hi_in = s > 1 ? w.M / s : w.M * s;
      bool all_inside = true, any_outside_shrunk = false;
      for (int k = 0; k < 1000; ++k) {
        const Vec x = verify::gen_unit_vector(n, rng);
        const double r = (pair.v().mat() * x).norm() / (pair.t().mat() * x).norm();
        all_inside = all_inside && lo <= r && r <= hi;
        any_outside_shrunk = any_outside_shrunk || r < lo_in || r > hi_in;
      }
      // inflated window: the vector condition holds and so does the Loewner one
      EXPECT_TRUE(all_inside);
      EXPECT_EQ(loewner_compare(q, lo * lo * HermitianMatrix::identity(n), 1e-12).verdict, Verdict::holds);
      EXPECT_EQ(loewner_compare(hi * hi * HermitianMatrix::identity(n), q, 1e-12).verdict, Verdict::holds);
      // shrunk window: the Loewner condition fails, and the extreme eigenvectors violate the vector one
      const bool loewner_shrunk =
          loewner_compare(q, lo_in * lo_in * HermitianMatrix::identity(n), 1e-12).verdict == Verdict::holds &&
          loewner_compare(hi_in * hi_in * HermitianMatrix::identity(n), q, 1e-12).verdict == Verdict::holds;
      EXPECT_FALSE(loewner_shrunk);
      const auto& ev = pair.quotient_eig();
      const Mat tinv = inverse(pair.t().mat());
      const Vec x_min = tinv * ev.eigenvectors.col(0);
      const double r_min = (pair.v().mat() * x_min).norm() / (pair.t().mat() * x_min).norm();
      EXPECT_TRUE(r_min < lo_in || r_min > hi_in || any_outside_shrunk);
    }
  }
}

TEST(Matfun, CongruenceExamples) {
  const auto x = hd({3, 4});
  expect_near(congruence(ComplexMatrix::identity(2), x).mat(), x.mat());
  expect_near(congruence(cm({{1, 2}, {3, 4}}), HermitianMatrix::zero(2)).mat(), Mat::Zero(2, 2));
  expect_near(congruence(cd({1, 2}), x).mat(), hd({3, 16}).mat());
}

TEST(Matfun, CongruencePreservesOrder) {
  verify::Engine rng(6);
  for (Eigen::Index n : {1, 3, 5}) {
    const auto b = verify::gen_pd(n, rng);
    const auto a = b + verify::gen_pd(n, rng);
    const auto t = verify::gen_invertible(n, rng);
    EXPECT_EQ(loewner_compare(congruence(t, a), congruence(t, b), Tolerance{}).verdict, Verdict::holds);
  }
}

TEST(Matfun, LoewnerCompareExamples) {
  auto v = loewner_compare(hd({2, 3}), HermitianMatrix::identity(2), 1e-9);
  EXPECT_EQ(v.verdict, Verdict::holds);
  EXPECT_NEAR(v.min_eig, 1.0, 1e-15);
  v = loewner_compare(hd({2, 3}), hd({2, 3}), 1e-9);
  EXPECT_EQ(v.verdict, Verdict::holds);
  EXPECT_EQ(v.min_eig, 0.0);
  v = loewner_compare(hd({1, 0}), hd({0, 1}), 1e-9);
  EXPECT_EQ(v.verdict, Verdict::fails);
  EXPECT_NEAR(v.min_eig, -1.0, 1e-15);
}

TEST(Matfun, VerdictBands) {
  EXPECT_EQ(classify(-1e-10, 1e-10), Verdict::holds);
  EXPECT_EQ(classify(-5e-10, 1e-10), Verdict::borderline);
  EXPECT_EQ(classify(-2e-9, 1e-10), Verdict::fails);
  const Tolerance tol;
  EXPECT_DOUBLE_EQ(tol.for_pair(hd({3, 4}).mat(), hd({0}).mat()), 1e-10 + 1e-9 * 5.0);
}

TEST(Matfun, ConditionGuard) {
  EXPECT_EQ(kind_of([] { OperatorPair(cd({1, 1e-9}), cd({1, 1})); }), ErrorKind::SingularT);
  EXPECT_NO_THROW(OperatorPair(cd({1, 1e-3}), cd({1, 1})));
  EXPECT_EQ(kind_of([] { OperatorPair(cd({1}), cd({1, 1})); }), ErrorKind::DimensionMismatch);
}

// ---------------------------------------------------------------------------
// funcatalog

TEST(Funcatalog, Examples) {
  const auto nl = parse_catalog_function("neg_log");
  EXPECT_DOUBLE_EQ(nl(2), -std::log(2.0));
  EXPECT_DOUBLE_EQ(nl.subgrad(2), -0.5);
  const auto p2 = parse_catalog_function("pow(2)");
  EXPECT_DOUBLE_EQ(p2(3), 9);
  EXPECT_DOUBLE_EQ(p2.subgrad(3), 6);
  EXPECT_DOUBLE_EQ(parse_catalog_function("tsallis(-1)")(2), 0.5);
  EXPECT_EQ(parse_catalog_function("pow(0.5)").convexity, Convexity::concave);
  EXPECT_EQ(parse_catalog_function("tsallis(2)").convexity, Convexity::convex);
  EXPECT_EQ(kind_of([] { parse_catalog_function("cosh"); }), ErrorKind::UnknownFunction);
  EXPECT_EQ(kind_of([] { parse_catalog_function("tsallis(0)"); }), ErrorKind::ZeroParameter);
}

TEST(Funcatalog, TsallisConvexOnlyFromOrderOne) {
  // T_t'' = (t - 1) x^(t - 2): convex exactly when t >= 1
  for (double t : {-2.0, -1.0, -0.5, 0.5}) EXPECT_NE(make_catalog_function("tsallis", {t}).convexity, Convexity::convex);
  for (double t : {1.0, 1.5, 3.0}) EXPECT_EQ(make_catalog_function("tsallis", {t}).convexity, Convexity::convex);
}

TEST(Funcatalog, SubgradientInequalityOnGrid) {
  for (const auto& id : {"pow(2)", "pow(3)", "pow(-1)", "pow(1.5)", "neg_pow(0.5)", "neg_log", "xlogx", "identity",
                         "tsallis(2)"}) {
    const auto f = parse_catalog_function(id);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        const double t = 0.1 + i, a = 0.1 + 0.9 * j;
        EXPECT_GE(f(a) - f(t) - f.subgrad(t) * (a - t), -1e-12 * (1 + std::abs(f(a)))) << id << " t=" << t;
      }
  }
}

TEST(Funcatalog, ElementaryLogInequality) {
  for (int k = 1; k <= 1000; ++k) {
    const double t = k / 100.0;
    EXPECT_LE(std::log(t), t - 1.0);
  }
}

TEST(Funcatalog, ScalarYoung) {
  verify::Engine rng(8);
  std::uniform_real_distribution<double> u(0.01, 100.0), w(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double x = u(rng), y = u(rng), nu = w(rng);
    EXPECT_LE(std::pow(x, 1 - nu) * std::pow(y, nu), ((1 - nu) * x + nu * y) * (1 + 1e-15));
  }
}

TEST(Funcatalog, IntegralMeanExamples) {
  EXPECT_DOUBLE_EQ(integral_mean(parse_catalog_function("identity"), 0.5, 1.5), 1.0);
  EXPECT_NEAR(integral_mean(parse_catalog_function("pow(0.5)"), 1.0, 4.0), std::pow(p_log_mean(1, 4, 0.5), 0.5),
              1e-14);
  EXPECT_NEAR(integral_mean(parse_catalog_function("log"), 1.0, e * e), std::log(identric(1, e * e)), 1e-14);
  EXPECT_NEAR(integral_mean(parse_catalog_function("log"), 1.0, 4.0), std::log(identric(1, 4)), 1e-14);
  // no antiderivative: quadrature path
  const auto f = derivative_times_identity(parse_catalog_function("pow(2)"));
  EXPECT_NEAR(integral_mean(f, 1.0, 2.0), 2.0 * (8.0 - 1.0) / 3.0, 1e-10);
}

TEST(Funcatalog, MeanExamples) {
  EXPECT_DOUBLE_EQ(p_log_mean(5, 5, 2), 5);
  EXPECT_NEAR(p_log_mean(2, 4, 1), 3, 1e-15);
  EXPECT_NEAR(p_log_mean(1, e, -1), e - 1, 1e-14);
  EXPECT_DOUBLE_EQ(identric(1, 1), 1);
  EXPECT_NEAR(identric(1, e), std::exp(e / (e - 1)) / e, 1e-14);
  EXPECT_NEAR(p_log_mean(1, e, 1e-9), identric(1, e), 1e-8);
  EXPECT_DOUBLE_EQ(log_mean(3, 3), 3);
  EXPECT_NEAR(log_mean(1, e), e - 1, 1e-14);
  const double l = log_mean(2, 8);
  EXPECT_TRUE(2 <= l && l <= 8);
  EXPECT_EQ(kind_of([] { log_mean(-1, 2); }), ErrorKind::NonPositiveInput);
}

TEST(Funcatalog, TsallisScalar) {
  EXPECT_DOUBLE_EQ(t_fun(4, 1), 3);
  for (double t : {-2.0, 0.5, 3.0}) EXPECT_EQ(t_fun(1, t), 0.0);
  EXPECT_NEAR(t_fun(2, -1), 0.5, 1e-15);
  EXPECT_NEAR(t_fun(2, 1) * 0.5, 0.5, 1e-15);
  EXPECT_EQ(kind_of([] { t_fun(2, 0); }), ErrorKind::ZeroParameter);
}

// ---------------------------------------------------------------------------
// perspectives

TEST(Perspectives, PerspectiveExamples) {
  const auto b = HermitianMatrix(cm({{2, 1}, {1, 3}}).mat());
  const auto sq = parse_catalog_function("pow(2)");
  expect_near(perspective(sq, b, HermitianMatrix::identity(2)).mat(), b.mat() * b.mat());
  expect_near(perspective(sq, hd({4}), hd({2})).mat(), hd({8}).mat());
  expect_near(perspective(parse_catalog_function("identity"), b, hd({1, 5})).mat(), b.mat(), 1e-12);
}

TEST(Perspectives, QuadPerspectiveExamples) {
  const OperatorPair pair(cm({{1, 2}, {0, 3}}), cm({{2, 0}, {1, 1}}));
  expect_near(quad_perspective(parse_catalog_function("identity"), pair).mat(), pair.abs2_v().mat(), 1e-12);
  expect_near(quad_perspective(make_catalog_function("pow", {0}), pair).mat(), pair.abs2_t().mat(), 1e-12);
  expect_near(quad_perspective(parse_catalog_function("pow(2)"), diag_pair({1, 1}, {1, 2})).mat(), hd({1, 16}).mat());
}

TEST(Perspectives, MeansExamples) {
  const auto a = hd({2, 5});
  const auto b = hd({7, 1});
  expect_near(arith_mean(a, b, 0).mat(), a.mat());
  expect_near(arith_mean(a, b, 1).mat(), b.mat());
  expect_near(arith_mean(hd({2}), hd({4}), 0.5).mat(), hd({3}).mat());
  expect_near(geo_mean(a, b, 0).mat(), a.mat());
  expect_near(geo_mean(HermitianMatrix::identity(2), b, 0.3).mat(), hd({std::pow(7, 0.3), 1}).mat());
  expect_near(geo_mean(hd({1}), hd({9}), 0.5).mat(), hd({3}).mat());
  expect_near(harm_mean(a, b, 0).mat(), a.mat());
  expect_near(harm_mean(a, b, 1).mat(), b.mat());
  expect_near(harm_mean(hd({2}), hd({6}), 0.5).mat(), hd({3}).mat());
  EXPECT_EQ(kind_of([&] { geo_mean(a, b, 1.5); }), ErrorKind::WeightOutOfRange);
  EXPECT_EQ(kind_of([&] { geo_mean(hd({0, 1}), b, 0.5); }), ErrorKind::NotPositiveDefinite);
}

TEST(Perspectives, RelativeEntropyExamples) {
  const auto a = HermitianMatrix(cm({{2, 1}, {1, 3}}).mat());
  expect_near(rel_entropy(a, a).mat(), Mat::Zero(2, 2));
  expect_near(rel_entropy(hd({1}), hd({e})).mat(), hd({1}).mat());
  expect_near(rel_entropy(hd({2}), hd({2 * e})).mat(), hd({2}).mat(), 1e-14);
  const OperatorPair pair(cm({{1, 2}, {0, 3}}), cm({{1, 2}, {0, 3}}));
  expect_near(quad_rel_entropy(pair).mat(), Mat::Zero(2, 2), 1e-12);
  expect_near(quad_rel_entropy(diag_pair({1}, {std::sqrt(e)})).mat(), hd({1}).mat(), 1e-15);
}

TEST(Perspectives, RelativeEntropyOfSquareRoots) {
  verify::Engine rng(9);
  const auto half = make_catalog_function("pow", {0.5});
  for (Eigen::Index n : {1, 2, 4}) {
    const auto a = verify::gen_pd(n, rng);
    const auto b = verify::gen_pd(n, rng);
    const OperatorPair pair(ComplexMatrix(apply_fun(a, half.eval, half.dom).mat()),
                            ComplexMatrix(apply_fun(b, half.eval, half.dom).mat()));
    EXPECT_LE(relative_frobenius(quad_rel_entropy(pair).mat(), rel_entropy(a, b).mat()), 1e-9);
  }
}

TEST(Perspectives, GeoMeanExamples) {
  expect_near(quad_geo_mean(diag_pair({1}, {4}), 0.5).mat(), hd({4}).mat());
  expect_near(quad_geo_mean(diag_pair({2}, {3}), 0.5).mat(), hd({6}).mat(), 1e-14);
  const OperatorPair pair(cm({{1, 2}, {0, 3}}), cm({{2, 0}, {1, 1}}));
  expect_near(quad_geo_mean(pair, 0).mat(), pair.abs2_t().mat(), 1e-12);
  expect_near(quad_geo_mean(pair, 1).mat(), pair.abs2_v().mat(), 1e-12);
}

TEST(Perspectives, PerspectiveRecoversNamedForms) {
  verify::Engine rng(10);
  for (Eigen::Index n : {1, 3, 5}) {
    const OperatorPair pair(verify::gen_invertible(n, rng), verify::gen_invertible(n, rng));
    EXPECT_LE(relative_frobenius(quad_perspective(make_catalog_function("pow", {0.3}), pair).mat(),
                                 quad_geo_mean(pair, 0.3).mat()),
              1e-12);
    EXPECT_LE(relative_frobenius(quad_perspective(make_catalog_function("log"), pair).mat(),
                                 quad_rel_entropy(pair).mat()),
              1e-12);
    EXPECT_LE(relative_frobenius(quad_perspective(make_catalog_function("tsallis", {0.7}), pair).mat(),
                                 quad_tsallis(pair, 0.7).mat()),
              1e-12);
    EXPECT_LE(relative_frobenius(quad_tsallis_via_mean(pair, 0.7).mat(), quad_tsallis(pair, 0.7).mat()), 1e-9);
  }
}

TEST(Perspectives, TsallisExamples) {
  expect_near(quad_tsallis(diag_pair({1}, {2}), 1).mat(), hd({3}).mat(), 1e-14);
  const OperatorPair same(cm({{1, 2}, {0, 3}}), cm({{1, 2}, {0, 3}}));
  expect_near(quad_tsallis(same, 0.5).mat(), Mat::Zero(2, 2), 1e-12);
  EXPECT_EQ(kind_of([&] { quad_tsallis(same, 0); }), ErrorKind::ZeroParameter);
}

TEST(Perspectives, NegativeOrderProductIdentity) {
  verify::Engine rng(11);
  for (Eigen::Index n : {1, 2, 5}) {
    const OperatorPair pair(verify::gen_invertible(n, rng), verify::gen_invertible(n, rng));
    EXPECT_LE(relative_frobenius(tsallis_negative_product_form(pair, 0.5), quad_tsallis(pair, -0.5).mat()), 1e-10);
  }
}

TEST(Perspectives, AbsPerspectiveExamples) {
  expect_near(abs_perspective(diag_pair({1, 1}, {1, 3}), 2).mat(), hd({1, 7}).mat(), 1e-13);
  expect_near(abs_perspective(diag_pair({1}, {2}), 5).mat(), hd({1}).mat(), 1e-14);
  const auto t = cm({{1, 2}, {0, 3}});
  const OperatorPair scaled(t, ComplexMatrix(std::sqrt(2.0) * t.mat()));
  expect_near(abs_perspective(scaled, 2).mat(), Mat::Zero(2, 2), 1e-12);
}

TEST(Perspectives, AbsPerspectiveTwoForms) {
  verify::Engine rng(12);
  for (Eigen::Index n : {1, 3, 5}) {
    const OperatorPair pair(verify::gen_invertible(n, rng), verify::gen_invertible(n, rng));
    const auto w = spectral_window(pair);
    EXPECT_LE(relative_frobenius(abs_perspective(pair, w.mid()).mat(), abs_perspective_inner_form(pair, w.mid()).mat()),
              1e-9);
  }
}

// ---------------------------------------------------------------------------
// bounds

TEST(Bounds, WindowExamples) {
  auto w = spectral_window(diag_pair({1, 1}, {2, 3}), 0.0);
  EXPECT_NEAR(w.m, 2, 1e-15);
  EXPECT_NEAR(w.M, 3, 1e-15);
  EXPECT_FALSE(w.padded);
  w = spectral_window(diag_pair({1, 1}, {1, 2}), 0.01);
  EXPECT_NEAR(w.m, 0.99, 1e-15);
  EXPECT_NEAR(w.M, 2.02, 1e-15);
  const auto t = cm({{1, 2}, {0, 3}});
  w = spectral_window(OperatorPair(t, t), 0.0);
  EXPECT_TRUE(w.padded);
  EXPECT_LT(w.m, 1.0);
  EXPECT_GT(w.M, 1.0);
}

TEST(Bounds, TangentExamples) {
  const auto sq = parse_catalog_function("pow(2)");
  const auto r = lower_bound_tangent(sq, 1, diag_pair({1, 1}, {1, 2}));
  expect_near(r.bound.mat(), hd({1, 7}).mat());
  EXPECT_EQ(r.verdict.verdict, Verdict::holds);
  expect_near(lower_bound_tangent(sq, 1, diag_pair({1}, {1})).bound.mat(), hd({1}).mat());
  const auto nl = parse_catalog_function("neg_log");
  const auto pair = diag_pair({1}, {2});
  const auto b = lower_bound_tangent(nl, 4, pair).bound;
  expect_near(b.mat(), hd({-std::log(4.0)}).mat(), 1e-15);
  expect_near(b.mat(), quad_perspective(nl, pair).mat(), 1e-15);
  EXPECT_EQ(kind_of([&] { lower_bound_tangent(nl, -1, pair); }), ErrorKind::AnchorOutOfDomain);
  EXPECT_EQ(kind_of([&] { lower_bound_tangent(parse_catalog_function("log"), 1, pair); }), ErrorKind::InvalidParameter);
}

TEST(Bounds, MidpointExample) {
  // Phi(t) + phi(t)(s - t) at t = 2.5 for s = 1, 4
  const auto sq = parse_catalog_function("pow(2)");
  const auto pair = diag_pair({1, 1}, {1, 2});
  const auto r = lower_bound_midpoint(sq, pair, spectral_window(pair, 0.0));
  EXPECT_DOUBLE_EQ(r.anchor, 2.5);
  expect_near(r.bound.mat(), hd({-1.25, 13.75}).mat());
  const auto scalar = diag_pair({1}, {2});
  const auto tight = lower_bound_midpoint(sq, scalar, spectral_window(scalar, 0.0));
  EXPECT_NEAR(tight.bound(0, 0).real(), 16.0, 1e-4);
  EXPECT_EQ(tight.verdict.verdict, Verdict::holds);
}

TEST(Bounds, RayleighExamples) {
  const auto sq = parse_catalog_function("pow(2)");
  const auto pair = diag_pair({1, 1}, {1, 2});
  Vec x(2);
  x << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const auto r = lower_bound_rayleigh(sq, pair, x);
  EXPECT_NEAR(r.report.anchor, 2.5, 1e-15);
  EXPECT_NEAR(r.jensen_lhs, 8.5, 1e-14);
  EXPECT_NEAR(r.jensen_rhs, 6.25, 1e-14);
  Vec e1(2);
  e1 << 1, 0;
  const auto at1 = lower_bound_rayleigh(sq, pair, e1);
  EXPECT_DOUBLE_EQ(at1.report.anchor, 1.0);
  expect_near(at1.report.bound.mat(), lower_bound_tangent(sq, 1, pair).bound.mat());
  const auto lin = lower_bound_rayleigh(parse_catalog_function("identity"), pair, e1);
  EXPECT_NEAR(lin.jensen_lhs, lin.jensen_rhs, 1e-15);
  EXPECT_EQ(kind_of([&] { lower_bound_rayleigh(sq, pair, Vec::Zero(2)); }), ErrorKind::ZeroVector);
}

TEST(Bounds, IntegralMeanLinearIsExact) {
  const OperatorPair pair(cm({{1, 2}, {0, 3}}), cm({{2, 0}, {1, 1}}));
  const auto r = lower_bound_integral_mean(parse_catalog_function("identity"), pair, spectral_window(pair));
  expect_near(r.bound.mat(), pair.abs2_v().mat(), 1e-12);
}

TEST(Bounds, UpperChainExamples) {
  const auto sq = parse_catalog_function("pow(2)");
  const auto pair = diag_pair({1}, {2});
  const auto w = spectral_window(pair, 0.01);
  const auto c = upper_bound_chain(sq, 4, pair, w);
  EXPECT_NEAR(c.first.bound(0, 0).real(), 16.0, 1e-13);
  EXPECT_EQ(c.first.verdict.verdict, Verdict::holds);
  EXPECT_EQ(c.second_over_first.verdict, Verdict::holds);

  const auto lin = upper_bound_chain(parse_catalog_function("identity"), 1.7, diag_pair({1, 2}, {3, 1}));
  expect_near(lin.first.bound.mat(), hd({9, 1}).mat(), 1e-13);
  expect_near(lin.second.bound.mat(), hd({9, 1}).mat(), 1e-13);
}

TEST(Bounds, UpperChainNegLogTerms) {
  // derivative perspectives of -ln: Dl gives -|T|^2, D gives -|T|^2 |V|^-2 |T|^2
  const auto nl = parse_catalog_function("neg_log");
  const auto pair = diag_pair({1, 1}, {1, 4});
  expect_near(quad_perspective(derivative_times_identity(nl), pair).mat(), -1.0 * Mat::Identity(2, 2), 1e-14);
  expect_near(quad_perspective(derivative_of(nl), pair).mat(), hd({-1, -1.0 / 16}).mat(), 1e-14);
  const auto c = upper_bound_chain(nl, 2, pair, spectral_window(pair));
  expect_near(c.first.bound.mat(), (nl(2) * HermitianMatrix::identity(2) + hd({-1, -1}) - 2 * hd({-1, -1.0 / 16})).mat(),
              1e-14);
}

TEST(Bounds, MidpointChainCollapsesOnNarrowWindow) {
  const auto pair = diag_pair({1}, {2});
  const auto c = upper_bound_midpoint(parse_catalog_function("pow(2)"), pair, spectral_window(pair, 0.0));
  EXPECT_NEAR(c.third.bound(0, 0).real(), c.second.bound(0, 0).real(), 1e-9);
}

TEST(Bounds, UpperRayleighAtEigenvector) {
  const auto sq = parse_catalog_function("pow(2)");
  const auto pair = diag_pair({1, 1}, {1, 2});
  Vec e2(2);
  e2 << 0, 1;
  const auto w = spectral_window(pair);
  const auto r = upper_bound_rayleigh(sq, pair, e2, w);
  expect_near(r.chain.first.bound.mat(), upper_bound_chain(sq, 4, pair, w).first.bound.mat(), 1e-12);
  EXPECT_LE(r.scalar_lhs, r.scalar_mid + 1e-12);
  EXPECT_LE(r.scalar_mid, r.scalar_rhs + 1e-12);
}

TEST(Bounds, IntegralUpperChainAndQuadrature) {
  const auto sq = parse_catalog_function("pow(2)");
  const auto pair = diag_pair({1}, {2});
  const SpectralWindow w{std::sqrt(3.9), std::sqrt(4.1), false};
  const auto c = upper_bound_integral_mean(sq, pair, w);
  EXPECT_EQ(c.first.verdict.verdict, Verdict::holds);
  EXPECT_EQ(c.second_over_first.verdict, Verdict::holds);
  // (1/(b-a)) int |4 - t| dt over [a, b]
  const double a = w.m2(), b = w.M2();
  const double want = ((4 - a) * (4 - a) + (b - 4) * (b - 4)) / (2 * (b - a));
  EXPECT_NEAR(c.abs_mean(0, 0).real(), want, 1e-12);
}

TEST(Bounds, AnchorSweepOrdersEverything) {
  verify::Engine rng(13);
  for (const auto& id : {"pow(2)", "neg_log", "xlogx", "pow(-1)", "tsallis(2)"}) {
    const auto f = parse_catalog_function(id);
    const OperatorPair pair(verify::gen_invertible(3, rng), verify::gen_invertible(3, rng));
    const auto w = spectral_window(pair);
    for (double t : verify::anchor_sweep(verify::Sweep::window, w)) {
      EXPECT_EQ(lower_bound_tangent(f, t, pair).verdict.verdict, Verdict::holds) << id;
      const auto c = upper_bound_chain(f, t, pair, w);
      EXPECT_EQ(c.first.verdict.verdict, Verdict::holds) << id;
      EXPECT_EQ(c.second.verdict.verdict, Verdict::holds) << id;
      EXPECT_EQ(c.second_over_first.verdict, Verdict::holds) << id;
    }
  }
}

TEST(Bounds, UpperAnchorOutsideWindowRejected) {
  // x^2 on [1, 2] anchored at 10: B1 undercuts the perspective
  const auto pair = diag_pair({1, 1}, {1, 2});
  const auto w = spectral_window(pair, 0.0);
  EXPECT_EQ(kind_of([&] { upper_bound_chain(parse_catalog_function("pow(2)"), 10, pair, w); }),
            ErrorKind::AnchorOutOfDomain);
}

TEST(Bounds, ConcaveFunctionsRejected) {
  const auto pair = diag_pair({1}, {2});
  EXPECT_EQ(kind_of([&] { upper_bound_chain(parse_catalog_function("pow(0.5)"), 4, pair); }),
            ErrorKind::InvalidParameter);
}
