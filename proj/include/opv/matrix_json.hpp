#pragma once

// Matrix JSON: { "n": int, "entries": [[ [re, im], ... n ], ... n rows] }, row-major.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "opv/matfun.hpp"

namespace opv {

using json = nlohmann::json;

inline json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return json{{"n", m.rows()}, {"entries", std::move(rows)}};
}

inline json matrix_to_json(const ComplexMatrix& m) { return matrix_to_json(m.mat()); }
inline json matrix_to_json(const HermitianMatrix& m) { return matrix_to_json(m.mat()); }

inline ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("entries"))
    throw Error(ErrorKind::InvalidInput, "matrix JSON needs fields \"n\" and \"entries\"");
  if (!j.at("n").is_number_integer() || j.at("n").get<long long>() < 1)
    throw Error(ErrorKind::InvalidInput, "matrix JSON \"n\" must be a positive integer");
  const auto n = static_cast<Eigen::Index>(j.at("n").get<long long>());
  const json& rows = j.at("entries");
  if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n)
    throw Error(ErrorKind::InvalidInput, "matrix JSON \"entries\" must have n rows");
  Mat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw Error(ErrorKind::InvalidInput, "matrix JSON row " + std::to_string(i) + " must have n entries");
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& e = row[static_cast<std::size_t>(k)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw Error(ErrorKind::InvalidInput, "matrix JSON entry must be [re, im]");
      m(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return ComplexMatrix(std::move(m));
}

/// Vectors use { "n": int, "vector": [ [re, im], ... ] }.
inline json vector_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(json::array({v(i).real(), v(i).imag()}));
  return json{{"n", v.size()}, {"vector", std::move(arr)}};
}

inline Vec vector_from_json(const json& j) {
  if (!j.is_object() || !j.contains("vector") || !j.at("vector").is_array())
    throw Error(ErrorKind::InvalidInput, "vector JSON needs field \"vector\"");
  const json& arr = j.at("vector");
  Vec v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const json& e = arr[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw Error(ErrorKind::InvalidInput, "vector JSON entry must be [re, im]");
    v(static_cast<Eigen::Index>(i)) = cplx(e[0].get<double>(), e[1].get<double>());
  }
  if (j.contains("n") && j.at("n") != static_cast<long long>(arr.size()))
    throw Error(ErrorKind::InvalidInput, "vector JSON \"n\" does not match its length");
  return v;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, path + ": " + e.what());
  }
}

inline ComplexMatrix read_matrix_file(const std::string& path) { return matrix_from_json(read_json_file(path)); }

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace opv
