#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "convstab/alpha_bounds.hpp"
#include "convstab/autocorr_toeplitz.hpp"
#include "convstab/errors.hpp"
#include "convstab/freiman.hpp"
#include "convstab/sparse_sequence.hpp"

// JSON encodings:
//   sequence      {"support":[int,...],"values":[[re,im],...]}
//   toeplitz      {"n":int,"autocorr":[[re,im],...]}
//   compression   {"domain":[...],"image":[...],"diameter":int,"bound_n":int,"within_bound":bool}
// Doubles are written in shortest round-trip form, so re-reading is lossless.

namespace convstab::json {

using nlohmann::json;

namespace detail {

[[noreturn]] inline void bad(const std::string& what) { throw InvalidArgument("json: " + what); }

inline double finite_number(const json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(std::string(what) + " must be finite");
  return v;
}

}  // namespace detail

inline json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

// Accepts [re, im] or a bare real number.
inline Complex complex_from_json(const json& j) {
  if (j.is_number()) return {detail::finite_number(j, "value"), 0.0};
  if (!j.is_array() || j.size() != 2) detail::bad("complex value must be [re, im]");
  return {detail::finite_number(j[0], "real part"), detail::finite_number(j[1], "imaginary part")};
}

inline Index index_from_json(const json& j) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<Index>::max())) {
      throw OverflowError("json: index exceeds int64 range");
    }
    return j.get<Index>();
  }
  detail::bad("index must be an integer");
}

inline std::vector<Index> indices_from_json(const json& j) {
  if (!j.is_array()) detail::bad("expected an array of integers");
  std::vector<Index> out;
  for (const auto& e : j) out.push_back(index_from_json(e));
  return out;
}

inline json to_json(const SparseSequence& x) {
  json values = json::array();
  for (const auto& z : x.values()) values.push_back(complex_to_json(z));
  return {{"support", std::vector<Index>(x.support().begin(), x.support().end())}, {"values", values}};
}

inline SparseSequence sequence_from_json(const json& j) {
  if (!j.is_object()) detail::bad("sequence must be an object");
  if (!j.contains("support") || !j.contains("values")) detail::bad("sequence needs \"support\" and \"values\"");
  auto support = indices_from_json(j.at("support"));
  const auto& vj = j.at("values");
  if (!vj.is_array()) detail::bad("\"values\" must be an array");
  std::vector<Complex> values;
  for (const auto& e : vj) values.push_back(complex_from_json(e));
  return SparseSequence(std::move(support), std::move(values));
}

inline json to_json(const DenseVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
  return out;
}

inline DenseVector dense_from_json(const json& j) {
  if (!j.is_array() || j.empty()) detail::bad("dense vector must be a non-empty array");
  DenseVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i]);
  return v;
}

inline json to_json(const AutocorrToeplitz& B) {
  json b = json::array();
  for (const auto& z : B.autocorr()) b.push_back(complex_to_json(z));
  return {{"n", B.dimension()}, {"autocorr", b}};
}

inline AutocorrToeplitz toeplitz_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("autocorr")) detail::bad("matrix needs \"n\" and \"autocorr\"");
  const Index n = index_from_json(j.at("n"));
  const auto& bj = j.at("autocorr");
  if (!bj.is_array() || static_cast<Index>(bj.size()) != n) detail::bad("\"autocorr\" must have n entries");
  std::vector<Complex> b;
  for (const auto& e : bj) b.push_back(complex_from_json(e));
  return AutocorrToeplitz(std::move(b));
}

inline json to_json(const CompressionResult& r) {
  const auto dom = r.map.domain().elements();
  const auto img = r.map.image();
  return {{"domain", std::vector<Index>(dom.begin(), dom.end())},
          {"image", std::vector<Index>(img.begin(), img.end())},
          {"diameter", r.diameter},
          {"bound_n", r.bound_n},
          {"within_bound", r.within_bound}};
}

inline json to_json(const WitnessPair& w) { return {{"x", to_json(w.x)}, {"y", to_json(w.y)}}; }

inline json to_json(const StabilityReport& r) {
  json out = {{"s", r.s},
              {"f", r.f},
              {"beta", r.beta},
              {"alpha_upper", r.upper.alpha_upper},
              {"witness", to_json(r.upper.witness)},
              {"alpha_lower", nullptr},
              {"n_eff", r.n_eff},
              {"seed", r.seed},
              {"restarts", r.upper.starts},
              {"rounds", r.upper.rounds}};
  if (r.lower) {
    out["alpha_lower"] = r.lower->alpha_bound;
    out["lower_bound"] = {{"d_hat", r.lower->d_hat},
                          {"lambda_bound", r.lower->lambda_bound},
                          {"is_estimate", r.lower->is_estimate},
                          {"instance_bound", r.lower->instance_bound},
                          {"instance_lambda", r.lower->instance_lambda}};
  }
  return out;
}

inline json to_json(const MonotonicityTable& t) {
  return {{"s_max", t.s_max}, {"f_max", t.f_max}, {"n_eff", t.n_eff}, {"values", t.values},
          {"monotone", t.monotone}, {"symmetric", t.symmetric}};
}

}  // namespace convstab::json
