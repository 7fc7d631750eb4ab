// Quadratic geometric mean and relative entropy of a fixed pair, with the
// tangent-line and integral-mean bounds around the perspective of -ln.

#include <iostream>

#include "opv/opv.hpp"

int main(int argc, char** argv) {
  using namespace opv;
  const std::string dir = argc > 1 ? argv[1] : "demo/data";
  const OperatorPair pair(read_matrix_file(dir + "/T.json"), read_matrix_file(dir + "/V.json"));
  const auto w = spectral_window(pair);
  std::cout << "window [m2, M2] = [" << w.m2() << ", " << w.M2() << "]\n";

  const auto ent = quad_rel_entropy(pair);
  std::cout << "entQ(T,V) eigenvalues: " << eigenvalues(ent).transpose() << "\n";

  const auto phi = make_catalog_function("neg_log");
  const auto lower = lower_bound_tangent(phi, w.mid(), pair);
  const auto upper = upper_bound_integral_mean(phi, pair, w);
  std::cout << "tangent at mid-window <= perspQ: " << to_string(lower.verdict.verdict) << "\n";
  std::cout << "perspQ <= integral-mean bound: " << to_string(upper.first.verdict.verdict) << "\n";

  dsl::Binding env;
  env.set("T", pair.t());
  env.set("V", pair.v());
  const auto v = std::get<LoewnerVerdict>(dsl::evaluate("geoQ(T, V, 0.5) <= nabla(abs2(T), abs2(V), 0.5)", env));
  std::cout << "geoQ(T,V,1/2) <= nabla: " << to_string(v.verdict) << " (min_eig " << v.min_eig << ")\n";
}
