#pragma once

// Seeded random instances. Every trial draws from its own engine, seeded by
// (campaign seed, record id, dimension, trial index).

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "opv/bounds.hpp"
#include "opv/dsl/eval.hpp"
#include "opv/funcatalog.hpp"
#include "opv/matfun.hpp"
#include "opv/verify/catalog.hpp"

namespace opv::verify {

using Engine = std::mt19937_64;

inline constexpr int kMaxResamples = 100;
/// Condition bound used for campaign instances (the library default stays kDefaultKappaMax).
inline constexpr double kCampaignKappa = 100.0;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::string_view record, Eigen::Index dim, std::uint64_t trial) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ fnv1a(record));
  s = splitmix64(s ^ static_cast<std::uint64_t>(dim));
  return splitmix64(s ^ trial);
}

namespace detail {

inline Mat gaussian(Eigen::Index n, Engine& rng, bool diagonal) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Mat m = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      // draw every entry so the stream does not depend on the diagonal flag
      const cplx z(g(rng), g(rng));
      if (!diagonal || i == j) m(i, j) = z;
    }
  return m;
}

}  // namespace detail

inline ComplexMatrix gen_invertible(Eigen::Index n, Engine& rng, double kappa_max = kCampaignKappa,
                                    bool diagonal = false) {
  if (n < 1) throw Error(ErrorKind::InvalidParameter, "dimension must be >= 1");
  for (int k = 0; k < kMaxResamples; ++k) {
    ComplexMatrix m(detail::gaussian(n, rng, diagonal));
    if (condition_number(m) <= kappa_max) return m;
  }
  throw Error(ErrorKind::GenerationExhausted, "no matrix with condition number <= " + format_number(kappa_max) +
                                                  " after " + std::to_string(kMaxResamples) + " draws");
}

inline ComplexMatrix gen_invertible(Eigen::Index n, std::uint64_t seed, double kappa_max = kCampaignKappa) {
  Engine rng(seed);
  return gen_invertible(n, rng, kappa_max);
}

/// G*G + 1e-3 ||G*G||_F 1.
inline HermitianMatrix gen_pd(Eigen::Index n, Engine& rng, bool diagonal = false) {
  if (n < 1) throw Error(ErrorKind::InvalidParameter, "dimension must be >= 1");
  const Mat g = detail::gaussian(n, rng, diagonal);
  const Mat p = g.adjoint() * g;
  return HermitianMatrix::symmetrized(p + 1e-3 * p.norm() * Mat::Identity(n, n));
}

inline HermitianMatrix gen_pd(Eigen::Index n, std::uint64_t seed) {
  Engine rng(seed);
  return gen_pd(n, rng);
}

inline Vec gen_unit_vector(Eigen::Index n, Engine& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  const double nrm = v.norm();
  if (nrm == 0.0) v(0) = 1.0;
  return nrm == 0.0 ? v : Vec(v / nrm);
}

/// Convex, continuously differentiable catalog functions cycled through by trial index.
inline const std::vector<std::string>& convex_function_ids() {
  static const std::vector<std::string> ids{"identity", "pow(2)",       "pow(3)",  "pow(-1)", "pow(-0.5)",
                                            "pow(1.5)", "neg_pow(0.5)", "neg_log", "xlogx",   "tsallis(2)"};
  return ids;
}

inline const std::vector<double>& tsallis_grid(bool positive_only) {
  static const std::vector<double> all{-1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0};
  static const std::vector<double> pos{0.25, 0.5, 1.0, 2.0};
  return positive_only ? pos : all;
}

struct GenOptions {
  double kappa_max = kCampaignKappa;
  double pad = kDefaultPad;
  bool diagonal = false;
};

struct Instance {
  std::string record;
  Eigen::Index dim = 0;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;  // per-trial seed
  ComplexMatrix T = ComplexMatrix::identity(1);
  ComplexMatrix V = ComplexMatrix::identity(1);
  HermitianMatrix A = HermitianMatrix::identity(1);
  HermitianMatrix B = HermitianMatrix::identity(1);
  Vec x;
  Vec y;
  double nu = 0.5;
  double t = 1.0;
  double s = 1.0;
  std::string phi = "identity";
  SpectralWindow window;
  std::vector<double> anchors;  // values of t to sweep
};

inline std::vector<double> anchor_sweep(Sweep sweep, const SpectralWindow& w, int count = 20) {
  std::vector<double> out;
  if (sweep == Sweep::window) {
    for (int k = 0; k < count; ++k) out.push_back(w.m2() + (w.M2() - w.m2()) * k / (count - 1));
    out.back() = w.M2();
  } else if (sweep == Sweep::wide) {
    const double lo = std::log(w.m2() / 4.0);
    const double hi = std::log(4.0 * w.M2());
    for (int k = 0; k < count; ++k) out.push_back(std::exp(lo + (hi - lo) * k / (count - 1)));
  }
  return out;
}

/// Draws every field in a fixed order, so the stream is identical for all records.
inline Instance generate_instance(const InequalityRecord& rec, Eigen::Index n, std::uint64_t seed,
                                  std::uint64_t trial, const GenOptions& opt = {}) {
  Instance in;
  in.record = rec.id;
  in.dim = n;
  in.trial = trial;
  in.seed = trial_seed(seed, rec.id, n, trial);
  Engine rng(in.seed);
  in.T = gen_invertible(n, rng, opt.kappa_max, opt.diagonal);
  in.V = gen_invertible(n, rng, opt.kappa_max, opt.diagonal);
  in.A = gen_pd(n, rng, opt.diagonal);
  in.B = gen_pd(n, rng, opt.diagonal);
  in.x = gen_unit_vector(n, rng);
  in.y = gen_unit_vector(n, rng);

  std::uniform_int_distribution<int> grid(rec.weights == WeightGrid::open ? 1 : 0,
                                          rec.weights == WeightGrid::open ? 9 : 10);
  in.nu = grid(rng) / 10.0;
  const auto& tg = tsallis_grid(rec.sweep == Sweep::tsallis_positive);
  std::uniform_int_distribution<std::size_t> pick(0, tg.size() - 1);
  in.t = tg[pick(rng)];
  std::uniform_real_distribution<double> logs(std::log(0.1), std::log(10.0));
  in.s = std::exp(logs(rng));
  const auto& ids = convex_function_ids();
  in.phi = ids[trial % ids.size()];

  in.window = spectral_window(OperatorPair(in.T, in.V, opt.kappa_max), opt.pad);
  in.anchors = anchor_sweep(rec.sweep, in.window);
  if (in.anchors.empty()) in.anchors.push_back(in.t);
  return in;
}

inline dsl::Binding bind_instance(const Instance& in) {
  dsl::Binding env;
  env.set("T", in.T);
  env.set("V", in.V);
  env.set("A", in.A);
  env.set("B", in.B);
  env.set("x", in.x);
  env.set("y", in.y);
  env.set("nu", in.nu);
  env.set("t", in.t);
  env.set("s", in.s);
  env.set("Phi", parse_catalog_function(in.phi));
  env.set("m2", in.window.m2());
  env.set("M2", in.window.M2());
  return env;
}

inline json instance_to_json(const Instance& in) {
  return json{{"record", in.record},
              {"dim", in.dim},
              {"trial", in.trial},
              {"trial_seed", in.seed},
              {"T", matrix_to_json(in.T)},
              {"V", matrix_to_json(in.V)},
              {"A", matrix_to_json(in.A)},
              {"B", matrix_to_json(in.B)},
              {"x", vector_to_json(in.x)},
              {"y", vector_to_json(in.y)},
              {"nu", in.nu},
              {"t", in.t},
              {"s", in.s},
              {"Phi", in.phi},
              {"m2", in.window.m2()},
              {"M2", in.window.M2()}};
}

}  // namespace opv::verify
