// opv: compute, check, fuzz, list.
// Exit codes: 0 holds, 1 fails, 2 usage or IO error, 3 borderline.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "opv/opv.hpp"

namespace {

using namespace opv;

enum Exit { kHolds = 0, kFails = 1, kUsage = 2, kBorderline = 3 };

struct Options {
  std::string expr;
  std::string ineq;
  std::vector<std::string> binds;
  std::vector<std::string> records;
  bool random = false;
  Eigen::Index dim = 3;
  std::vector<Eigen::Index> dims{1, 2, 3, 5, 8};
  std::uint64_t trials = 200;
  std::uint64_t seed = 42;
  double tol = 1e-10;
  double rtol = 1e-9;
  double pad = kDefaultPad;
  double kappa = verify::kCampaignKappa;
  std::optional<double> nu;
  std::optional<double> t;
  std::string out;
  std::string format = "text";
  bool diagonal = false;
  unsigned threads = 0;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt(cplx z) {
  if (z.imag() == 0.0) return fmt(z.real());
  return fmt(z.real()) + (z.imag() < 0 ? "-" : "+") + fmt(std::abs(z.imag())) + "i";
}

std::string matrix_text(const HermitianMatrix& h) {
  std::ostringstream os;
  const Mat& m = h.mat();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << fmt(m(i, j));
    os << "]\n";
  }
  const auto ev = eigenvalues(h);
  os << "eigenvalues:";
  for (Eigen::Index i = 0; i < ev.size(); ++i) os << " " << fmt(ev(i));
  os << "\n";
  return os.str();
}

json eigen_json(const HermitianMatrix& h) {
  const auto ev = eigenvalues(h);
  json arr = json::array();
  for (Eigen::Index i = 0; i < ev.size(); ++i) arr.push_back(ev(i));
  return arr;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + o.out);
  f << text;
}

/// NAME=VALUE where VALUE is a number, a matrix/vector JSON file, or a catalog function.
void apply_bind(dsl::Binding& env, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error(ErrorKind::InvalidInput, "--bind expects NAME=VALUE, got '" + spec + "'");
  const std::string name = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);
  char* end = nullptr;
  const double x = std::strtod(value.c_str(), &end);
  if (!value.empty() && end == value.c_str() + value.size()) {
    env.set(name, x);
    return;
  }
  const bool looks_like_path = value.find('/') != std::string::npos || value.ends_with(".json");
  if (looks_like_path || std::filesystem::exists(value)) {
    const json j = read_json_file(value);
    if (j.contains("vector")) env.set(name, vector_from_json(j));
    else env.set(name, matrix_from_json(j));
    return;
  }
  try {
    env.set(name, parse_catalog_function(value));
  } catch (const Error&) {
    throw Error(ErrorKind::InvalidInput, "--bind " + name + ": '" + value + "' is not a number, file, or function");
  }
}

/// Fills m2, M2 from T, V when they are bound and the window is not.
void complete_window(dsl::Binding& env, const Options& o) {
  if (env.contains("m2") || env.contains("M2")) return;
  const auto* t = env.find("T");
  const auto* v = env.find("V");
  if (!t || !v) return;
  const auto* tm = std::get_if<dsl::MatValue>(t);
  const auto* vm = std::get_if<dsl::MatValue>(v);
  if (!tm || !vm) return;
  const auto w = spectral_window(OperatorPair(ComplexMatrix(tm->m), ComplexMatrix(vm->m), o.kappa), o.pad);
  env.set("m2", w.m2());
  env.set("M2", w.M2());
}

dsl::Binding build_env(const Options& o, const verify::InequalityRecord* rec, std::vector<double>* anchors) {
  dsl::Binding env;
  if (o.random) {
    verify::InequalityRecord adhoc;
    adhoc.id = "adhoc";
    const auto& r = rec ? *rec : adhoc;
    verify::GenOptions gen{o.kappa, o.pad, o.diagonal};
    const auto in = verify::generate_instance(r, o.dim, o.seed, 0, gen);
    env = verify::bind_instance(in);
    if (anchors && r.sweep != verify::Sweep::none && r.sweep != verify::Sweep::tsallis &&
        r.sweep != verify::Sweep::tsallis_positive)
      *anchors = in.anchors;
  }
  for (const auto& b : o.binds) apply_bind(env, b);
  if (o.nu) env.set("nu", *o.nu);
  if (o.t) {
    env.set("t", *o.t);
    if (anchors) anchors->clear();
  }
  complete_window(env, o);
  if (anchors && anchors->empty() && rec && !env.contains("t") &&
      (rec->sweep == verify::Sweep::window || rec->sweep == verify::Sweep::wide) && env.contains("m2")) {
    const auto* m2 = std::get_if<double>(env.find("m2"));
    const auto* big = std::get_if<double>(env.find("M2"));
    if (m2 && big) *anchors = verify::anchor_sweep(rec->sweep, SpectralWindow{std::sqrt(*m2), std::sqrt(*big), false});
  }
  return env;
}

int verdict_exit(Verdict v) {
  switch (v) {
    case Verdict::holds: return kHolds;
    case Verdict::fails: return kFails;
    case Verdict::borderline: return kBorderline;
  }
  return kUsage;
}

void print_verdict(const Options& o, const std::string& what, const LoewnerVerdict& v,
                   std::optional<double> anchor = {}) {
  if (o.format == "json") {
    json j{{"check", what}, {"verdict", std::string(to_string(v.verdict))}, {"min_eig", v.min_eig}, {"tol", v.tol}};
    if (anchor) j["anchor"] = *anchor;
    emit(o, j.dump(2) + "\n");
  } else {
    std::string s = what + "\nverdict: " + std::string(to_string(v.verdict)) + "\nmin_eig: " + fmt(v.min_eig) +
                    "\ntol: " + fmt(v.tol) + "\n";
    if (anchor) s += "anchor: " + fmt(*anchor) + "\n";
    emit(o, s);
  }
}

int cmd_compute(const Options& o) {
  if (o.expr.empty()) throw Error(ErrorKind::InvalidInput, "compute needs --expr");
  auto env = build_env(o, nullptr, nullptr);
  const Tolerance tol{o.tol, o.rtol};
  const auto ast = dsl::parse(o.expr);
  const auto res = dsl::evaluate(*ast, env, tol, o.kappa);
  if (const auto* v = std::get_if<LoewnerVerdict>(&res)) {
    print_verdict(o, dsl::print_canonical(ast), *v);
    return verdict_exit(v->verdict);
  }
  const HermitianMatrix h =
      std::holds_alternative<double>(res) ? HermitianMatrix::diagonal({std::get<double>(res)}) : std::get<HermitianMatrix>(res);
  if (o.format == "json") {
    json j = matrix_to_json(h);
    j["eigenvalues"] = eigen_json(h);
    emit(o, j.dump(2) + "\n");
  } else {
    emit(o, matrix_text(h));
  }
  return kHolds;
}

int cmd_check(const Options& o) {
  if (o.ineq.empty()) throw Error(ErrorKind::InvalidInput, "check needs --ineq ID or --ineq 'a <= b'");
  const verify::InequalityRecord* cat = verify::find_record(o.ineq);
  verify::InequalityRecord adhoc;
  if (!cat) {
    const bool looks_like_id = o.ineq.find_first_of("<>=") == std::string::npos;
    if (looks_like_id) throw Error(ErrorKind::InvalidInput, "unknown catalog record '" + o.ineq + "'");
    adhoc = verify::record_from_text(o.ineq);
  }
  const auto& rec = cat ? *cat : adhoc;
  std::vector<double> anchors;
  auto env = build_env(o, &rec, &anchors);
  const Tolerance tol{o.tol, o.rtol};
  std::optional<verify::CheckOutcome> worst;
  dsl::Evaluator ev(env, o.kappa);
  auto run = [&](std::optional<double> a) {
    if (a) env.set("t", *a);
    verify::check_requirements(rec, env, o.kappa);
    auto out = verify::check_links(rec, ev, env, tol, o.kappa);
    out.anchor = a.value_or(0.0);
    if (!worst || verify::detail::worse(out.verdict, worst->verdict)) worst = out;
  };
  if (anchors.empty()) run(std::nullopt);
  for (double a : anchors) run(a);
  std::optional<double> anchor;
  if (anchors.size() > 1) anchor = worst->anchor;
  print_verdict(o, rec.id == "adhoc" ? rec.text() : rec.id + ": " + rec.text(), worst->verdict, anchor);
  return verdict_exit(worst->verdict.verdict);
}

int cmd_fuzz(const Options& o) {
  if (o.dims.empty()) throw Error(ErrorKind::InvalidInput, "--dims must not be empty");
  for (auto d : o.dims)
    if (d < 1) throw Error(ErrorKind::InvalidInput, "dimensions must be >= 1");
  verify::CampaignConfig cfg;
  cfg.records = o.records;
  cfg.dims = o.dims;
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.tol = {o.tol, o.rtol};
  cfg.gen = {o.kappa, o.pad, o.diagonal};
  cfg.threads = o.threads;
  for (const auto& id : cfg.records) verify::get_record(id);
  const auto reports = verify::fuzz_campaign(cfg);
  const json report = verify::report_json(cfg, reports);
  if (!o.out.empty()) write_json_file(o.out, report);
  if (o.format == "json") {
    if (o.out.empty()) std::cout << report.dump(2) << "\n";
  } else {
    for (const auto& r : reports)
      std::printf("%-10s worst_min_eig %-14s failures %zu\n", r.record.c_str(), fmt(r.worst_min_eig).c_str(),
                  r.failures.size());
    std::printf("records %zu, failures %zu\n", reports.size(), verify::failure_count(reports));
  }
  return verify::failure_count(reports) == 0 ? kHolds : kFails;
}

int cmd_list(const Options& o) {
  const auto& cat = verify::catalog();
  if (o.format == "json") {
    json arr = json::array();
    for (const auto& r : cat) {
      json links = json::array();
      for (const auto& l : r.links)
        links.push_back({{"lhs", r.member_text(l.lhs)}, {"rel", dsl::to_string(l.rel)}, {"rhs", r.member_text(l.rhs)}});
      json req = json::array();
      for (auto q : r.preconditions) req.push_back(std::string(to_string(q)));
      arr.push_back({{"id", r.id},
                     {"paper_eq", r.equation},
                     {"summary", r.summary},
                     {"relation", r.relation_text()},
                     {"text", r.text()},
                     {"links", links},
                     {"requires", req}});
    }
    emit(o, arr.dump(2) + "\n");
    return kHolds;
  }
  std::string s;
  for (const auto& r : cat) {
    std::string req;
    for (auto q : r.preconditions) req += (req.empty() ? "" : "; ") + std::string(to_string(q));
    s += r.id + "  " + r.equation + "  [" + r.relation_text() + "]  " + r.summary + "\n    " + r.text() +
         "\n    requires: " + (req.empty() ? "-" : req) + "\n";
  }
  s += std::to_string(cat.size()) + " records\n";
  emit(o, s);
  return kHolds;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  if (const char* env_seed = std::getenv("OPV_SEED")) {
    try {
      o.seed = std::stoull(env_seed);
    } catch (const std::exception&) {
      std::cerr << "error: OPV_SEED must be a non-negative integer\n";
      return kUsage;
    }
  }

  CLI::App app{"Quadratic operator perspectives, means and entropies; Loewner-order checks"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* c) {
    c->add_option("--bind", o.binds, "NAME=VALUE; VALUE is a number, a matrix/vector JSON file, or a function id");
    c->add_option("--nu", o.nu, "bind the weight nu");
    c->add_option("--t", o.t, "bind the parameter t");
    c->add_option("--tol", o.tol, "absolute tolerance")->capture_default_str();
    c->add_option("--rtol", o.rtol, "relative tolerance")->capture_default_str();
    c->add_option("--pad", o.pad, "relative padding of the spectral window")->capture_default_str();
    c->add_option("--kappa", o.kappa, "condition number guard")->capture_default_str();
    c->add_option("--out", o.out, "write output to a file");
    c->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  };

  auto* compute = app.add_subcommand("compute", "evaluate a DSL expression");
  compute->add_option("--expr", o.expr, "DSL expression")->required();
  add_common(compute);

  auto* check = app.add_subcommand("check", "check a catalog record or a DSL inequality");
  check->add_option("--ineq", o.ineq, "catalog id or DSL inequality")->required();
  check->add_flag("--random", o.random, "draw a random instance");
  check->add_option("--dim", o.dim, "dimension for --random")->check(CLI::PositiveNumber)->capture_default_str();
  check->add_option("--seed", o.seed, "random seed")->capture_default_str();
  check->add_flag("--diagonal", o.diagonal, "restrict random matrices to diagonal ones");
  add_common(check);

  auto* fuzz = app.add_subcommand("fuzz", "run a randomized campaign over catalog records");
  fuzz->add_option("--ineq", o.records, "catalog ids (default: all)");
  fuzz->add_option("--dims", o.dims, "dimensions")->delimiter(',')->capture_default_str();
  fuzz->add_option("--trials", o.trials, "trials per record and dimension")->capture_default_str();
  fuzz->add_option("--seed", o.seed, "campaign seed")->capture_default_str();
  fuzz->add_option("--threads", o.threads, "worker threads (0: all cores)");
  fuzz->add_flag("--diagonal", o.diagonal, "restrict random matrices to diagonal ones");
  add_common(fuzz);

  auto* list = app.add_subcommand("list", "list the inequality catalog");
  list->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text"}));
  list->add_option("--out", o.out, "write output to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*compute) return cmd_compute(o);
    if (*check) return cmd_check(o);
    if (*fuzz) return cmd_fuzz(o);
    if (*list) return cmd_list(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
