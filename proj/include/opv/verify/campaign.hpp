#pragma once

// Record checks, fuzz campaigns, JSON reports and single-trial replay.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "opv/dsl/eval.hpp"
#include "opv/verify/catalog.hpp"
#include "opv/verify/generate.hpp"

namespace opv::verify {

/// Worst link of one check.
struct CheckOutcome {
  LoewnerVerdict verdict{0.0, 1.0, Verdict::holds};
  std::size_t link = 0;
  double anchor = 0.0;
  bool retried = false;  // borderline verdict re-examined in extended precision
};

namespace detail {

inline double scalar_of(const dsl::Binding& env, std::string_view name) {
  const auto* v = env.find(name);
  if (!v) throw Error(ErrorKind::UnboundName, "requirement needs '" + std::string(name) + "' to be bound");
  if (const auto* d = std::get_if<double>(v)) return *d;
  throw Error(ErrorKind::TypeError, "'" + std::string(name) + "' must be a scalar");
}

inline const Mat& matrix_of(const dsl::Binding& env, std::string_view name) {
  const auto* v = env.find(name);
  if (!v) throw Error(ErrorKind::UnboundName, "requirement needs '" + std::string(name) + "' to be bound");
  if (const auto* m = std::get_if<dsl::MatValue>(v)) return m->m;
  throw Error(ErrorKind::TypeError, "'" + std::string(name) + "' must be a matrix");
}

[[noreturn]] inline void violated(const InequalityRecord& rec, std::string_view what) {
  throw Error(ErrorKind::RequirementViolated, rec.id + ": " + std::string(what));
}

/// Severity order for picking the worst link: fails > borderline > holds, then by min_eig / tol.
inline bool worse(const LoewnerVerdict& a, const LoewnerVerdict& b) {
  if (a.verdict != b.verdict) return static_cast<int>(a.verdict) > static_cast<int>(b.verdict);
  return a.min_eig / a.tol < b.min_eig / b.tol;
}

inline LoewnerVerdict extended_verdict(const HermitianMatrix& lhs, dsl::Rel rel, const HermitianMatrix& rhs,
                                       double tol) {
  double me = 0.0;
  switch (rel) {
    case dsl::Rel::le: me = min_eig_difference_extended(rhs.mat(), lhs.mat()); break;
    case dsl::Rel::ge: me = min_eig_difference_extended(lhs.mat(), rhs.mat()); break;
    case dsl::Rel::eq:
      me = std::min(min_eig_difference_extended(lhs.mat(), rhs.mat()),
                    min_eig_difference_extended(rhs.mat(), lhs.mat()));
      break;
  }
  return make_verdict(me, tol);
}

/// Product identity for the negative-order Tsallis entropy; min_eig is -||P - D||_2.
/// The product form inverts the geometric mean, so the tolerance scales with its condition number.
inline LoewnerVerdict tsallis_negative_identity(const dsl::Binding& env, double kappa, const Tolerance& tol) {
  const double t = scalar_of(env, "t");
  const OperatorPair pair(ComplexMatrix(matrix_of(env, "T")), ComplexMatrix(matrix_of(env, "V")), kappa);
  const Mat p = tsallis_negative_product_form(pair, t);
  const auto d = quad_tsallis(pair, -t);
  const Mat diff = p - d.mat();
  const double gap = diff.jacobiSvd().singularValues()(0);
  const double cond = condition_number(ComplexMatrix(quad_geo_mean(pair, t).mat()));
  return make_verdict(-gap, tol.atol + tol.rtol * cond * std::max(p.norm(), d.mat().norm()));
}

}  // namespace detail

/// Throws RequirementViolated when env does not satisfy the record's preconditions.
inline void check_requirements(const InequalityRecord& rec, const dsl::Binding& env,
                               double kappa = kDefaultKappaMax) {
  using R = Requirement;
  for (auto r : rec.preconditions) {
    switch (r) {
      case R::v_invertible:
        for (const char* name : {"T", "V"})
          if (condition_number(ComplexMatrix(detail::matrix_of(env, name))) > kappa)
            detail::violated(rec, std::string(name) + " fails the condition guard");
        break;
      case R::positive_definite:
        for (const char* name : {"A", "B"}) {
          const auto h = HermitianMatrix(ComplexMatrix(detail::matrix_of(env, name)));
          if (!is_positive_definite(h)) detail::violated(rec, std::string(name) + " is not positive definite");
        }
        break;
      case R::window: {
        const double m2 = detail::scalar_of(env, "m2");
        const double big = detail::scalar_of(env, "M2");
        if (!(m2 > 0.0 && big > m2)) detail::violated(rec, "window needs 0 < m2 < M2");
        const OperatorPair pair(ComplexMatrix(detail::matrix_of(env, "T")),
                                ComplexMatrix(detail::matrix_of(env, "V")), kappa);
        const auto& ev = pair.quotient_eig().eigenvalues;
        const double slack = 1e-12 * big;
        if (ev(0) < m2 - slack || ev(ev.size() - 1) > big + slack)
          detail::violated(rec, "spectrum of |V T^-1|^2 leaves [m2, M2]");
        break;
      }
      case R::unit_weight: {
        const double nu = detail::scalar_of(env, "nu");
        if (!(nu >= 0.0 && nu <= 1.0)) detail::violated(rec, "nu must lie in [0,1]");
        break;
      }
      case R::open_weight: {
        const double nu = detail::scalar_of(env, "nu");
        if (!(nu > 0.0 && nu < 1.0)) detail::violated(rec, "nu must lie in (0,1)");
        break;
      }
      case R::positive_t:
        if (!(detail::scalar_of(env, "t") > 0.0)) detail::violated(rec, "t must be positive");
        break;
      case R::nonzero_t:
        if (detail::scalar_of(env, "t") == 0.0) detail::violated(rec, "t must be nonzero");
        break;
      case R::anchor_in_window: {
        const double t = detail::scalar_of(env, "t");
        if (!(t >= detail::scalar_of(env, "m2") && t <= detail::scalar_of(env, "M2")))
          detail::violated(rec, "t must lie in [m2, M2]");
        break;
      }
      case R::convex_phi: {
        const auto* v = env.find("Phi");
        if (!v) throw Error(ErrorKind::UnboundName, "requirement needs 'Phi' to be bound");
        const auto* f = std::get_if<FunctionPtr>(v);
        if (!f) throw Error(ErrorKind::TypeError, "'Phi' must be a function");
        if ((*f)->convexity != Convexity::convex || !(*f)->differentiable())
          detail::violated(rec, (*f)->id + " is not a convex C1 function");
        break;
      }
      case R::unit_vectors:
        for (const char* name : {"x", "y"}) {
          const auto* v = env.find(name);
          if (!v) {
            if (std::string_view(name) == "y") continue;  // y is optional
            throw Error(ErrorKind::UnboundName, "requirement needs 'x' to be bound");
          }
          const auto* vec = std::get_if<Vec>(v);
          if (!vec) throw Error(ErrorKind::TypeError, std::string("'") + name + "' must be a vector");
          if (std::abs(vec->norm() - 1.0) > 1e-12) detail::violated(rec, std::string(name) + " must have norm 1");
        }
        break;
      case R::positive_s:
        if (!(detail::scalar_of(env, "s") > 0.0)) detail::violated(rec, "s must be positive");
        break;
    }
  }
}

/// Evaluates every member once and compares each link. Borderline links are retried
/// in extended precision.
inline CheckOutcome check_links(const InequalityRecord& rec, dsl::Evaluator& ev, const dsl::Binding& env,
                                const Tolerance& tol, double kappa) {
  CheckOutcome out;
  if (rec.builtin) {
    out.verdict = detail::tsallis_negative_identity(env, kappa, tol);
    return out;
  }
  std::vector<std::optional<HermitianMatrix>> vals(rec.members.size());
  auto member = [&](std::size_t i) -> const HermitianMatrix& {
    if (!vals[i]) {
      auto r = ev.evaluate(*rec.members[i], tol);
      if (auto* d = std::get_if<double>(&r)) vals[i] = HermitianMatrix::diagonal({*d});
      else vals[i] = std::get<HermitianMatrix>(std::move(r));
    }
    return *vals[i];
  };
  bool first = true;
  for (std::size_t k = 0; k < rec.links.size(); ++k) {
    const auto& l = rec.links[k];
    const auto& a = member(l.lhs);
    const auto& b = member(l.rhs);
    auto v = dsl::relation_verdict(a, l.rel, b, tol);
    bool retried = false;
    if (v.verdict == Verdict::borderline) {
      v = detail::extended_verdict(a, l.rel, b, v.tol);
      retried = true;
    }
    if (first || detail::worse(v, out.verdict)) {
      out.verdict = v;
      out.link = k;
      out.retried = retried;
      first = false;
    }
  }
  return out;
}

/// Checks one record against explicit bindings at the given tolerance.
inline LoewnerVerdict check_record(const InequalityRecord& rec, const dsl::Binding& env, const Tolerance& tol = {},
                                   double kappa = kDefaultKappaMax) {
  check_requirements(rec, env, kappa);
  dsl::Evaluator ev(env, kappa);
  return check_links(rec, ev, env, tol, kappa).verdict;
}

struct TrialResult {
  Instance instance;
  CheckOutcome outcome;
  std::string error;  // set when generation or evaluation threw
};

/// Runs one generated instance over all of its anchors.
inline TrialResult run_trial(const InequalityRecord& rec, Eigen::Index n, std::uint64_t seed, std::uint64_t trial,
                             const Tolerance& tol = {}, const GenOptions& opt = {}) {
  TrialResult res;
  try {
    res.instance = generate_instance(rec, n, seed, trial, opt);
    auto env = bind_instance(res.instance);
    dsl::Evaluator ev(env, opt.kappa_max);
    bool first = true;
    for (double t : res.instance.anchors) {
      env.set("t", t);
      auto o = check_links(rec, ev, env, tol, opt.kappa_max);
      o.anchor = t;
      if (first || detail::worse(o.verdict, res.outcome.verdict)) res.outcome = o;
      first = false;
    }
  } catch (const Error& e) {
    res.error = e.what();
    res.outcome.verdict = {std::nan(""), tol.atol, Verdict::fails};
  }
  return res;
}

struct Failure {
  std::uint64_t trial = 0;
  Eigen::Index dim = 0;
  CheckOutcome outcome;
  std::string error;
  json instance;
};

struct FuzzReport {
  std::string record;
  std::uint64_t trials = 0;
  std::vector<Eigen::Index> dims;
  std::uint64_t seed = 0;
  double worst_min_eig = 0.0;
  std::vector<Failure> failures;
  double elapsed = 0.0;
};

struct CampaignConfig {
  std::vector<std::string> records;  // empty: whole catalog
  std::vector<Eigen::Index> dims{1, 2, 3, 5, 8};
  std::uint64_t trials = 200;
  std::uint64_t seed = 42;
  Tolerance tol{};
  GenOptions gen{};
  unsigned threads = 0;  // 0: hardware concurrency
};

inline std::vector<FuzzReport> fuzz_campaign(const CampaignConfig& cfg) {
  std::vector<const InequalityRecord*> recs;
  if (cfg.records.empty()) {
    for (const auto& r : catalog()) recs.push_back(&r);
  } else {
    for (const auto& id : cfg.records) recs.push_back(&get_record(id));
  }
  if (cfg.trials == 0) return {};

  struct Unit {
    std::size_t rec = 0;
    Eigen::Index dim = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::vector<Failure> failures;
    double elapsed = 0.0;
  };
  std::vector<Unit> units;
  for (std::size_t r = 0; r < recs.size(); ++r)
    for (auto d : cfg.dims) units.push_back({r, d, std::numeric_limits<double>::infinity(), {}, 0.0});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t u = next++; u < units.size(); u = next++) {
      auto& unit = units[u];
      const auto& rec = *recs[unit.rec];
      const auto start = std::chrono::steady_clock::now();
      for (std::uint64_t k = 0; k < cfg.trials; ++k) {
        auto res = run_trial(rec, unit.dim, cfg.seed, k, cfg.tol, cfg.gen);
        const double me = res.outcome.verdict.min_eig;
        if (std::isnan(me) || me < unit.worst) unit.worst = std::isnan(me) ? -std::numeric_limits<double>::infinity() : me;
        if (!res.error.empty() || !res.outcome.verdict.holds()) {
          Failure f;
          f.trial = k;
          f.dim = unit.dim;
          f.outcome = res.outcome;
          f.error = res.error;
          if (res.error.empty() || res.instance.dim == unit.dim) f.instance = instance_to_json(res.instance);
          unit.failures.push_back(std::move(f));
        }
      }
      unit.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  unsigned n_threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, units.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<FuzzReport> out;
  for (std::size_t r = 0; r < recs.size(); ++r) {
    FuzzReport rep;
    rep.record = recs[r]->id;
    rep.trials = cfg.trials;
    rep.dims = cfg.dims;
    rep.seed = cfg.seed;
    rep.worst_min_eig = std::numeric_limits<double>::infinity();
    for (auto& unit : units) {
      if (unit.rec != r) continue;
      rep.worst_min_eig = std::min(rep.worst_min_eig, unit.worst);
      for (auto& f : unit.failures) rep.failures.push_back(std::move(f));
      rep.elapsed += unit.elapsed;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

inline std::size_t failure_count(const std::vector<FuzzReport>& reports) {
  std::size_t n = 0;
  for (const auto& r : reports) n += r.failures.size();
  return n;
}

inline json to_json(const Failure& f) {
  json j{{"trial", f.trial},
         {"dim", f.dim},
         {"min_eig", std::isnan(f.outcome.verdict.min_eig) ? json(nullptr) : json(f.outcome.verdict.min_eig)},
         {"tol", f.outcome.verdict.tol},
         {"verdict", std::string(to_string(f.outcome.verdict.verdict))},
         {"link", f.outcome.link},
         {"anchor", f.outcome.anchor},
         {"retried", f.outcome.retried}};
  if (!f.error.empty()) j["error"] = f.error;
  if (!f.instance.is_null()) j["matrices"] = f.instance;
  return j;
}

inline json to_json(const FuzzReport& r, bool with_elapsed = true) {
  json failures = json::array();
  for (const auto& f : r.failures) failures.push_back(to_json(f));
  json j{{"record", r.record},
         {"trials", r.trials},
         {"dims", r.dims},
         {"seed", r.seed},
         {"worst_min_eig", std::isfinite(r.worst_min_eig) ? json(r.worst_min_eig) : json(nullptr)},
         {"failures", std::move(failures)}};
  if (with_elapsed) j["elapsed"] = r.elapsed;
  return j;
}

inline json report_json(const CampaignConfig& cfg, const std::vector<FuzzReport>& reports,
                        bool with_elapsed = true) {
  json recs = json::array();
  for (const auto& r : reports) recs.push_back(to_json(r, with_elapsed));
  return json{{"campaign",
               {{"seed", cfg.seed},
                {"tol", {{"atol", cfg.tol.atol}, {"rtol", cfg.tol.rtol}}},
                {"dims", cfg.dims},
                {"trials", cfg.trials},
                {"kappa", cfg.gen.kappa_max},
                {"pad", cfg.gen.pad},
                {"diagonal", cfg.gen.diagonal}}},
              {"records", std::move(recs)}};
}

/// Regenerates and re-checks one trial of a campaign.
inline TrialResult replay(std::uint64_t seed, std::string_view record, Eigen::Index dim, std::uint64_t trial,
                          const Tolerance& tol = {}, const GenOptions& opt = {}) {
  return run_trial(get_record(record), dim, seed, trial, tol, opt);
}

}  // namespace opv::verify
