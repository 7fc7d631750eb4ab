#pragma once

// Named inequality records. Each record is a list of DSL members joined by
// relations; a chain a <= b <= c has three members and two links.

#include <algorithm>
#include <string>
#include <vector>

#include "opv/dsl/ast.hpp"

namespace opv::verify {

enum class Requirement {
  v_invertible,       // T and V pass the condition guard
  positive_definite,  // A and B positive definite
  window,             // m2 <= Sp(|V T^-1|^2) <= M2 with 0 < m2 < M2
  unit_weight,        // nu in [0,1]
  open_weight,        // nu in (0,1)
  positive_t,         // t > 0
  nonzero_t,          // t != 0
  anchor_in_window,   // m2 <= t <= M2
  convex_phi,         // Phi convex and continuously differentiable
  unit_vectors,       // x, y of norm 1
  positive_s,         // s > 0
};

inline std::string_view to_string(Requirement r) {
  switch (r) {
    case Requirement::v_invertible: return "T,V invertible";
    case Requirement::positive_definite: return "A,B positive definite";
    case Requirement::window: return "spectral window m2,M2";
    case Requirement::unit_weight: return "nu in [0,1]";
    case Requirement::open_weight: return "nu in (0,1)";
    case Requirement::positive_t: return "t > 0";
    case Requirement::nonzero_t: return "t != 0";
    case Requirement::anchor_in_window: return "t in [m2,M2]";
    case Requirement::convex_phi: return "Phi convex C1";
    case Requirement::unit_vectors: return "x,y unit";
    case Requirement::positive_s: return "s > 0";
  }
  return "?";
}

/// How the parameter `t` is drawn in campaigns.
enum class Sweep {
  none,
  window,          // 20 anchors spread over [m2, M2]
  wide,            // 20 log-spaced anchors over [m2/4, 4 M2]
  tsallis,         // one t from {+-0.25, +-0.5, +-1, 2}
  tsallis_positive // one t from {0.25, 0.5, 1, 2}
};

/// How the weight `nu` is drawn in campaigns.
enum class WeightGrid { unit, open };

struct Link {
  std::size_t lhs = 0;
  dsl::Rel rel = dsl::Rel::le;
  std::size_t rhs = 0;
};

struct InequalityRecord {
  std::string id;
  std::string equation;  // label printed by listings, e.g. "(e.1.8)"
  std::string summary;
  std::vector<dsl::NodePtr> members;
  std::vector<Link> links;
  std::vector<Requirement> preconditions;
  Sweep sweep = Sweep::none;
  WeightGrid weights = WeightGrid::unit;
  bool builtin = false;  // checked by code instead of DSL members
  std::string builtin_text;

  bool needs(Requirement r) const { return std::find(preconditions.begin(), preconditions.end(), r) != preconditions.end(); }

  std::string member_text(std::size_t i) const { return dsl::print_canonical(members.at(i)); }

  /// e.g. "<= <=" for a two-link chain
  std::string relation_text() const {
    if (builtin) return "==";
    std::string s;
    for (const auto& l : links) {
      if (!s.empty()) s += ' ';
      s += dsl::to_string(l.rel);
    }
    return s;
  }

  std::string text() const {
    if (builtin) return builtin_text;
    if (links.empty()) return member_text(0);
    std::string s;
    for (std::size_t i = 0; i < links.size(); ++i) {
      const auto& l = links[i];
      if (i > 0 && l.lhs == links[i - 1].rhs) {
        s += " " + std::string(dsl::to_string(l.rel)) + " " + member_text(l.rhs);
        continue;
      }
      if (i > 0) s += "; ";
      s += member_text(l.lhs) + " " + std::string(dsl::to_string(l.rel)) + " " + member_text(l.rhs);
    }
    return s;
  }
};

namespace detail {

using R = Requirement;

struct RecordBuilder {
  InequalityRecord rec;

  RecordBuilder(std::string id, std::string summary) {
    rec.id = id;
    rec.equation = "(" + id + ")";
    rec.summary = std::move(summary);
  }

  /// Chain of members m0 REL m1 REL m2 ... with one relation for all links.
  RecordBuilder& chain(dsl::Rel rel, std::initializer_list<std::string_view> texts) {
    const std::size_t base = rec.members.size();
    for (auto t : texts) rec.members.push_back(dsl::parse(t));
    for (std::size_t i = base; i + 1 < rec.members.size(); ++i) rec.links.push_back({i, rel, i + 1});
    return *this;
  }
  RecordBuilder& req(std::initializer_list<Requirement> r) {
    rec.preconditions.insert(rec.preconditions.end(), r);
    return *this;
  }
  RecordBuilder& sweep(Sweep s) {
    rec.sweep = s;
    return *this;
  }
  RecordBuilder& weights(WeightGrid g) {
    rec.weights = g;
    return *this;
  }
  RecordBuilder& equation(std::string e) {
    rec.equation = std::move(e);
    return *this;
  }
  InequalityRecord done() { return std::move(rec); }
};

// (m2 + M2)/2 and Rayleigh anchor, spliced into member texts
#define OPV_MID "(0.5 * (m2 + M2))"
#define OPV_RQ "rq(T, V, x)"

inline std::vector<InequalityRecord> build_catalog() {
  using dsl::Rel;
  std::vector<InequalityRecord> c;
  auto add = [&](RecordBuilder& b) { c.push_back(b.done()); };

  // --- introduction
  {
    RecordBuilder b("jen", "Jensen inequality for a convex function of a selfadjoint operator");
    b.equation("(Jen)")
        .chain(Rel::ge, {"ip(fn(Phi, A), x)", "fn(Phi, ip(A, x))"})
        .req({R::positive_definite, R::convex_phi, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("jen2", "Jensen inequality for the perspective P_Phi(B,A)");
    b.equation("(Jen2)")
        .chain(Rel::ge, {"ip(persp(Phi, B, A), x) * inv(ip(A, x))", "fn(Phi, ip(B, x) * inv(ip(A, x)))"})
        .req({R::positive_definite, R::convex_phi, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("ka", "weighted harmonic <= geometric <= arithmetic operator means");
    b.equation("(KA)")
        .chain(Rel::le, {"bang(A, B, nu)", "sharp(A, B, nu)", "nabla(A, B, nu)"})
        .req({R::positive_definite, R::unit_weight});
    add(b);
  }
  {
    RecordBuilder b("e.1.4", "quadratic geometric mean of square roots equals the Kubo-Ando geometric mean");
    b.chain(Rel::eq, {"geoQ(fn(pow(0.5), A), fn(pow(0.5), B), nu)", "sharp(A, B, nu)"})
        .req({R::positive_definite, R::unit_weight});
    add(b);
  }
  {
    RecordBuilder b("e.1.5", "double-modulus and congruence forms of the quadratic geometric mean agree");
    b.chain(Rel::eq, {"geoQmod(T, V, nu)", "geoQ(T, V, nu)"}).req({R::v_invertible, R::unit_weight});
    add(b);
  }
  {
    RecordBuilder b("e.1.6", "quadratic geometric mean below the arithmetic mean of |T|^2, |V|^2");
    b.chain(Rel::ge, {"nabla(abs2(T), abs2(V), nu)", "geoQ(T, V, nu)"}).req({R::v_invertible, R::unit_weight});
    add(b);
  }
  {
    RecordBuilder b("e.1.7", "quadratic geometric mean above the harmonic mean of |T|^2, |V|^2");
    b.chain(Rel::ge, {"geoQ(T, V, nu)", "bang(abs2(T), abs2(V), nu)"}).req({R::v_invertible, R::unit_weight});
    add(b);
  }
  {
    RecordBuilder b("e.1.8", "arithmetic >= quadratic geometric >= harmonic at weight 1/2");
    b.chain(Rel::ge, {"nabla(abs2(T), abs2(V), 0.5)", "geoQ(T, V, 0.5)", "bang(abs2(T), abs2(V), 0.5)"})
        .req({R::v_invertible});
    add(b);
  }
  {
    RecordBuilder b("e.1.9", "inverse and weight-flip identities for the quadratic geometric mean");
    b.chain(Rel::eq, {"inv(geoQ(T, V, nu))", "geoQ(inv(adj(T)), inv(adj(V)), nu)"})
        .chain(Rel::eq, {"geoQ(T, V, 1 - nu)", "geoQ(V, T, nu)"})
        .req({R::v_invertible, R::unit_weight});
    add(b);
  }
  {
    RecordBuilder b("e.1.6.a", "T_{-t}(s) = T_t(s) s^{-t}");
    b.chain(Rel::eq, {"fn(tsallis(0 - t), s)", "fn(tsallis(t), s) * fn(pow(0 - t), s)"})
        .req({R::nonzero_t, R::positive_s})
        .sweep(Sweep::tsallis);
    add(b);
  }
  {
    InequalityRecord r;
    r.id = "-TQ";
    r.equation = "(-TQ)";
    r.summary = "negative-order Tsallis entropy as a product with the inverse geometric mean";
    r.builtin = true;
    r.builtin_text = "tsallisQ(T, V, 0 - t) == tsallisQ(T, V, t) (geoQ(T, V, t))^-1 abs2(T)  [matrix product]";
    r.preconditions = {R::v_invertible, R::positive_t};
    r.sweep = Sweep::tsallis_positive;
    c.push_back(std::move(r));
  }
  {
    RecordBuilder b("e.1.10", "Tsallis entropies of order -t and t bracket the quadratic relative entropy");
    b.chain(Rel::le, {"tsallisQ(T, V, 0 - t)", "entQ(T, V)", "tsallisQ(T, V, t)"})
        .req({R::v_invertible, R::positive_t})
        .sweep(Sweep::tsallis_positive);
    add(b);
  }
  {
    RecordBuilder b("e.1.11", "relative entropy bracketed by |T|^2 - |T|^2|V|^-2|T|^2 and |V|^2 - |T|^2");
    b.chain(Rel::le, {"abs2(T) - cong(abs2(T), inv(abs2(V)))", "entQ(T, V)", "abs2(V) - abs2(T)"})
        .req({R::v_invertible});
    add(b);
  }
  {
    RecordBuilder b("e.2.3", "relative entropy bracketed through the weight-1/2 quadratic geometric mean");
    b.chain(Rel::le, {"2 * abs2(T) - 2 * cong(abs2(T), inv(geoQ(T, V, 0.5)))", "entQ(T, V)",
                      "2 * (geoQ(T, V, 0.5) - abs2(T))"})
        .req({R::v_invertible});
    add(b);
  }

  // --- lower bounds
  {
    RecordBuilder b("e.2.1", "tangent-line lower bound at an anchor t");
    b.chain(Rel::ge, {"perspQ(Phi, T, V)", "fn(Phi, t) * abs2(T) + dfn(Phi, t) * (abs2(V) - t * abs2(T))"})
        .req({R::v_invertible, R::window, R::convex_phi, R::anchor_in_window})
        .sweep(Sweep::window);
    add(b);
  }
  {
    RecordBuilder b("e.2.1.a", "tangent-line lower bound at the window midpoint");
    b.chain(Rel::ge, {"perspQ(Phi, T, V)", "fn(Phi, " OPV_MID ") * abs2(T) + dfn(Phi, " OPV_MID
                                           ") * (abs2(V) - " OPV_MID " * abs2(T))"})
        .req({R::v_invertible, R::window, R::convex_phi});
    add(b);
  }
  {
    RecordBuilder b("e.2.6", "tangent-line lower bound at the Rayleigh anchor ||Vx||^2/||Tx||^2");
    b.chain(Rel::ge, {"perspQ(Phi, T, V)", "fn(Phi, " OPV_RQ ") * abs2(T) + dfn(Phi, " OPV_RQ
                                           ") * (abs2(V) - " OPV_RQ " * abs2(T))"})
        .req({R::v_invertible, R::convex_phi, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("e.2.7", "Jensen inequality for the quadratic perspective along x");
    b.chain(Rel::ge, {"ip(perspQ(Phi, T, V), x) * inv(ip(abs2(T), x))", "fn(Phi, " OPV_RQ ")"})
        .req({R::v_invertible, R::convex_phi, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("e.2.8", "two-vector form: anchor from x, tested along y");
    b.chain(Rel::ge, {"ip(perspQ(Phi, T, V), y)", "fn(Phi, " OPV_RQ ") * ip(abs2(T), y) + dfn(Phi, " OPV_RQ
                                                   ") * (ip(abs2(V), y) - " OPV_RQ " * ip(abs2(T), y))"})
        .req({R::v_invertible, R::convex_phi, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("e.2.9", "integral-mean lower bound over [m2, M2]");
    b.chain(Rel::ge, {"perspQ(Phi, T, V)",
                      "2 * imean(Phi, m2, M2) * abs2(T) - inv(M2 - m2) * (fn(Phi, M2) * (M2 * abs2(T) - abs2(V)) + "
                      "fn(Phi, m2) * (abs2(V) - m2 * abs2(T)))"})
        .req({R::v_invertible, R::window, R::convex_phi});
    add(b);
  }

  // --- upper bounds
  {
    RecordBuilder b("e.2.11", "upper chain through P_{Phi' l} - t P_{Phi'} and the absolute-value perspective");
    b.chain(Rel::le, {"perspQ(Phi, T, V)", "fn(Phi, t) * abs2(T) + perspQ(Dl(Phi), T, V) - t * perspQ(D(Phi), T, V)",
                      "fn(Phi, t) * abs2(T) + dfn(Phi, t) * (abs2(V) - t * abs2(T)) + (dfn(Phi, M2) - dfn(Phi, m2)) "
                      "* absPersp(T, V, t)"})
        .req({R::v_invertible, R::window, R::convex_phi, R::anchor_in_window})
        .sweep(Sweep::window);
    add(b);
  }
  {
    RecordBuilder b("e.2.11.a", "upper chain at the window midpoint, closed by a multiple of |T|^2");
    b.chain(Rel::le,
            {"perspQ(Phi, T, V)",
             "fn(Phi, " OPV_MID ") * abs2(T) + perspQ(Dl(Phi), T, V) - " OPV_MID " * perspQ(D(Phi), T, V)",
             "fn(Phi, " OPV_MID ") * abs2(T) + dfn(Phi, " OPV_MID ") * (abs2(V) - " OPV_MID
             " * abs2(T)) + (dfn(Phi, M2) - dfn(Phi, m2)) * absPersp(T, V, " OPV_MID ")",
             "fn(Phi, " OPV_MID ") * abs2(T) + dfn(Phi, " OPV_MID ") * (abs2(V) - " OPV_MID
             " * abs2(T)) + 0.5 * (M2 - m2) * (dfn(Phi, M2) - dfn(Phi, m2)) * abs2(T)"})
        .req({R::v_invertible, R::window, R::convex_phi});
    add(b);
  }
  {
    RecordBuilder b("e.2.16", "upper chain at the Rayleigh anchor");
    b.chain(Rel::le,
            {"perspQ(Phi, T, V)",
             "fn(Phi, " OPV_RQ ") * abs2(T) + perspQ(Dl(Phi), T, V) - " OPV_RQ " * perspQ(D(Phi), T, V)",
             "fn(Phi, " OPV_RQ ") * abs2(T) + dfn(Phi, " OPV_RQ ") * (abs2(V) - " OPV_RQ
             " * abs2(T)) + (dfn(Phi, M2) - dfn(Phi, m2)) * absPersp(T, V, " OPV_RQ ")"})
        .req({R::v_invertible, R::window, R::convex_phi, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("e.2.17", "scalar upper chain along x at the Rayleigh anchor");
    b.chain(Rel::le, {"ip(perspQ(Phi, T, V), x)",
                      "fn(Phi, " OPV_RQ ") * ip(abs2(T), x) + ip(perspQ(Dl(Phi), T, V), x) - " OPV_RQ
                      " * ip(perspQ(D(Phi), T, V), x)",
                      "fn(Phi, " OPV_RQ ") * ip(abs2(T), x) + (dfn(Phi, M2) - dfn(Phi, m2)) * ip(absPersp(T, V, " OPV_RQ
                      "), x)"})
        .req({R::v_invertible, R::window, R::convex_phi, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("e.2.18", "upper chain averaged over anchors in [m2, M2]");
    b.chain(Rel::le,
            {"perspQ(Phi, T, V)",
             "imean(Phi, m2, M2) * abs2(T) + perspQ(Dl(Phi), T, V) - " OPV_MID " * perspQ(D(Phi), T, V)",
             "2 * imean(Phi, m2, M2) * abs2(T) - inv(M2 - m2) * (fn(Phi, M2) * (M2 * abs2(T) - abs2(V)) + "
             "fn(Phi, m2) * (abs2(V) - m2 * abs2(T))) + (dfn(Phi, M2) - dfn(Phi, m2)) * absPerspMean(T, V, m2, M2)"})
        .req({R::v_invertible, R::window, R::convex_phi});
    add(b);
  }

  // --- quadratic geometric mean
  {
    RecordBuilder b("e.3.1", "quadratic geometric mean below a weighted arithmetic mean, any t > 0");
    b.chain(Rel::le, {"geoQ(T, V, nu)", "nabla(fn(pow(nu), t) * abs2(T), fn(pow(nu - 1), t) * abs2(V), nu)"})
        .req({R::v_invertible, R::unit_weight, R::positive_t})
        .sweep(Sweep::wide);
    add(b);
  }
  {
    RecordBuilder b("e.3.2", "the e.3.1 bound at the window midpoint");
    b.chain(Rel::le, {"geoQ(T, V, nu)", "(1 - nu) * fn(pow(nu), " OPV_MID ") * abs2(T) + nu * fn(pow(nu - 1), " OPV_MID
                                        ") * abs2(V)"})
        .req({R::v_invertible, R::window, R::unit_weight});
    add(b);
  }
  {
    RecordBuilder b("e.3.3", "the e.3.1 bound at the Rayleigh anchor");
    b.chain(Rel::le, {"geoQ(T, V, nu)", "(1 - nu) * fn(pow(nu), " OPV_RQ ") * abs2(T) + nu * fn(pow(1 - nu), inv(" OPV_RQ
                                        ")) * abs2(V)"})
        .req({R::v_invertible, R::unit_weight, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("e.3.4", "<T S_nu V x, x> <= ||Tx||^(2(1-nu)) ||Vx||^(2 nu)");
    b.chain(Rel::le, {"ip(geoQ(T, V, nu), x)", "fn(pow(1 - nu), ip(abs2(T), x)) * fn(pow(nu), ip(abs2(V), x))"})
        .req({R::v_invertible, R::unit_weight, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("YY", "vector form of the arithmetic upper bound");
    b.equation("(YY)")
        .chain(Rel::le, {"ip(geoQ(T, V, nu), x)", "(1 - nu) * ip(abs2(T), x) + nu * ip(abs2(V), x)"})
        .req({R::v_invertible, R::unit_weight, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("e.3.4.a", "scalar weighted AM-GM along x");
    b.chain(Rel::le, {"fn(pow(1 - nu), ip(abs2(T), x)) * fn(pow(nu), ip(abs2(V), x))",
                      "(1 - nu) * ip(abs2(T), x) + nu * ip(abs2(V), x)"})
        .req({R::v_invertible, R::unit_weight, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("e.3.4.b", "refinement of (YY) through the weighted geometric mean of the norms");
    b.chain(Rel::le, {"ip(geoQ(T, V, nu), x)", "fn(pow(1 - nu), ip(abs2(T), x)) * fn(pow(nu), ip(abs2(V), x))",
                      "(1 - nu) * ip(abs2(T), x) + nu * ip(abs2(V), x)"})
        .req({R::v_invertible, R::unit_weight, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("e.3.5", "integral-mean bound with the p-logarithmic mean L_nu^nu");
    b.chain(Rel::le, {"geoQ(T, V, nu)",
                      "2 * fn(pow(nu), Lp(m2, M2, nu)) * abs2(T) - inv(M2 - m2) * (fn(pow(nu), M2) * (M2 * abs2(T) - "
                      "abs2(V)) + fn(pow(nu), m2) * (abs2(V) - m2 * abs2(T)))"})
        .req({R::v_invertible, R::window, R::open_weight})
        .weights(WeightGrid::open);
    add(b);
  }
  {
    RecordBuilder b("e.3.7", "reverse chain for the quadratic geometric mean at the window midpoint");
    b.chain(Rel::ge,
            {"geoQ(T, V, nu)",
             "fn(pow(nu), " OPV_MID ") * abs2(T) + nu * geoQ(T, V, nu) - nu * " OPV_MID " * geoQ(T, V, nu - 1)",
             "(1 - nu) * fn(pow(nu), " OPV_MID ") * abs2(T) + nu * fn(pow(nu - 1), " OPV_MID
             ") * abs2(V) + nu * (fn(pow(nu - 1), M2) - fn(pow(nu - 1), m2)) * absPersp(T, V, " OPV_MID ")",
             "(1 - nu) * fn(pow(nu), " OPV_MID ") * abs2(T) + nu * fn(pow(nu - 1), " OPV_MID
             ") * abs2(V) + 0.5 * nu * (M2 - m2) * (fn(pow(nu - 1), M2) - fn(pow(nu - 1), m2)) * abs2(T)"})
        .req({R::v_invertible, R::window, R::unit_weight});
    add(b);
  }
  {
    RecordBuilder b("e.3.8", "reverse of (e.3.2); the constant is read as a multiple of |T|^2");
    b.chain(Rel::ge,
            {"0.5 * nu * (M2 - m2) * (fn(pow(1 - nu), M2) - fn(pow(1 - nu), m2)) * inv(fn(pow(1 - nu), m2) * "
             "fn(pow(1 - nu), M2)) * abs2(T)",
             "(1 - nu) * fn(pow(nu), " OPV_MID ") * abs2(T) + nu * fn(pow(nu - 1), " OPV_MID
             ") * abs2(V) - geoQ(T, V, nu)",
             "0 * abs2(T)"})
        .req({R::v_invertible, R::window, R::unit_weight});
    add(b);
  }

  // --- quadratic relative entropy
  {
    RecordBuilder b("e.6.2", "relative entropy below (ln t - 1)|T|^2 + |V|^2 / t, any t > 0");
    b.chain(Rel::le, {"entQ(T, V)", "fn(log, t) * abs2(T) - abs2(T) + inv(t) * abs2(V)"})
        .req({R::v_invertible, R::positive_t})
        .sweep(Sweep::wide);
    add(b);
  }
  {
    RecordBuilder b("e.6.3", "the e.6.2 bound at the window midpoint");
    b.chain(Rel::le, {"entQ(T, V)", "fn(log, " OPV_MID ") * abs2(T) + inv(" OPV_MID ") * (abs2(V) - " OPV_MID
                                    " * abs2(T))"})
        .req({R::v_invertible, R::window});
    add(b);
  }
  {
    RecordBuilder b("e.6.4", "the e.6.2 bound at the Rayleigh anchor");
    b.chain(Rel::le, {"entQ(T, V)", "fn(log, " OPV_RQ ") * abs2(T) + inv(" OPV_RQ ") * abs2(V) - abs2(T)"})
        .req({R::v_invertible, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("e.6.5", "<entQ x, x> <= ||Tx||^2 ln(||Vx||^2/||Tx||^2)");
    b.chain(Rel::le, {"ip(entQ(T, V), x)", "ip(abs2(T), x) * fn(log, " OPV_RQ ")"})
        .req({R::v_invertible, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("e.6.5.a", "relative entropy below |V|^2 - |T|^2");
    b.chain(Rel::le, {"entQ(T, V)", "abs2(V) - abs2(T)"}).req({R::v_invertible});
    add(b);
  }
  {
    RecordBuilder b("e.6.5.b", "vector form of (e.6.5.a)");
    b.chain(Rel::le, {"ip(entQ(T, V), x)", "ip(abs2(V), x) - ip(abs2(T), x)"})
        .req({R::v_invertible, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("e.6.5.c", "ln r <= r - 1 at the Rayleigh anchor, chained with (e.6.5)");
    b.chain(Rel::le, {"ip(entQ(T, V), x)", "ip(abs2(T), x) * fn(log, " OPV_RQ ")", "ip(abs2(V), x) - ip(abs2(T), x)"})
        .req({R::v_invertible, R::unit_vectors});
    add(b);
  }
  {
    RecordBuilder b("e.6.6", "integral-mean bound with the identric mean");
    b.chain(Rel::le, {"entQ(T, V)",
                      "2 * fn(log, identric(m2, M2)) * abs2(T) - inv(M2 - m2) * (fn(log, M2) * (M2 * abs2(T) - "
                      "abs2(V)) + fn(log, m2) * (abs2(V) - m2 * abs2(T)))"})
        .req({R::v_invertible, R::window});
    add(b);
  }
  {
    RecordBuilder b("e.6.8", "reverse chain for the relative entropy at the window midpoint");
    b.chain(Rel::ge,
            {"entQ(T, V)",
             "fn(log, " OPV_MID ") * abs2(T) + abs2(T) - " OPV_MID " * cong(abs2(T), inv(abs2(V)))",
             "fn(log, " OPV_MID ") * abs2(T) + inv(" OPV_MID ") * (abs2(V) - " OPV_MID
             " * abs2(T)) - (M2 - m2) * inv(m2 * M2) * absPersp(T, V, " OPV_MID ")",
             "fn(log, " OPV_MID ") * abs2(T) + inv(" OPV_MID ") * (abs2(V) - " OPV_MID
             " * abs2(T)) - 0.5 * (M2 - m2) * (M2 - m2) * inv(m2 * M2) * abs2(T)"})
        .req({R::v_invertible, R::window});
    add(b);
  }
  {
    RecordBuilder b("e.6.9", "reverse of (e.6.3); the constant is read as a multiple of |T|^2");
    b.chain(Rel::ge, {"0.5 * (M2 - m2) * (M2 - m2) * inv(m2 * M2) * abs2(T)",
                      "fn(log, " OPV_MID ") * abs2(T) + inv(" OPV_MID ") * (abs2(V) - " OPV_MID
                      " * abs2(T)) - entQ(T, V)",
                      "0 * abs2(T)"})
        .req({R::v_invertible, R::window});
    add(b);
  }
  return c;
}

#undef OPV_MID
#undef OPV_RQ

}  // namespace detail

inline const std::vector<InequalityRecord>& catalog() {
  static const std::vector<InequalityRecord> records = detail::build_catalog();
  return records;
}

inline const InequalityRecord* find_record(std::string_view id) {
  for (const auto& r : catalog())
    if (r.id == id) return &r;
  return nullptr;
}

inline const InequalityRecord& get_record(std::string_view id) {
  if (const auto* r = find_record(id)) return *r;
  throw Error(ErrorKind::InvalidInput, "unknown catalog record '" + std::string(id) + "'");
}

/// Ad-hoc record for a single DSL relation; no preconditions.
inline InequalityRecord record_from_text(std::string_view src) {
  auto ast = dsl::parse(src);
  if (ast->kind != dsl::NodeKind::relation)
    throw Error(ErrorKind::InvalidInput, "expected an inequality such as 'a <= b'");
  InequalityRecord rec;
  rec.id = "adhoc";
  rec.equation = "-";
  rec.members = {ast->children.at(0), ast->children.at(1)};
  rec.links = {{0, ast->rel, 1}};
  return rec;
}

}  // namespace opv::verify
