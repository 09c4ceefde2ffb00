#pragma once

// JSON / JSON-lines encodings of the public types.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hypercross/cross.hpp"
#include "hypercross/error.hpp"
#include "hypercross/interval.hpp"
#include "hypercross/multiindex.hpp"
#include "hypercross/pde/galerkin.hpp"
#include "hypercross/pde/trig.hpp"
#include "hypercross/sequences.hpp"
#include "hypercross/tensorfield.hpp"

namespace hypercross::io {

using Json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& what) { fail(ErrorKind::Parse, what); }

template <class T>
T get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_fail(std::string("field \"") + key + "\": " + e.what());
  }
}

inline double number(const Json& j, const std::string& what) {
  if (!j.is_number()) parse_fail(what + " must be a number");
  return j.get<double>();
}

inline std::int64_t integer(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) parse_fail(what + " must be an integer");
  return j.get<std::int64_t>();
}

}  // namespace detail

inline Json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Parse, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, path + ": " + e.what());
  }
}

inline Json to_json(const Interval& x) { return Json{{"lo", x.lo}, {"hi", x.hi}, {"divergent", x.divergent}}; }

// -- MultiIndex: {"1":2,"5":3}

inline Json to_json(const MultiIndex& s) {
  Json out = Json::object();
  for (const auto& e : s.entries()) out[std::to_string(e.dim)] = e.exp;
  return out;
}

inline MultiIndex multiindex_from_json(const Json& j) {
  if (!j.is_object()) detail::parse_fail("multi-index must be a JSON object");
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  for (const auto& [key, val] : j.items()) {
    std::uint64_t dim = 0;
    const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), dim);
    if (ec != std::errc() || ptr != key.data() + key.size() || dim == 0)
      detail::parse_fail("multi-index key \"" + key + "\" is not a positive integer");
    const std::int64_t e = detail::integer(val, "multi-index exponent");
    if (e < 0) detail::parse_fail("multi-index exponents must be nonnegative");
    pairs.emplace_back(dim, static_cast<std::uint64_t>(e));
  }
  return MultiIndex::from_pairs(std::move(pairs));
}

// -- WeightSequence: {"head":[...],"tail":{"kind":"zero"}|{"kind":"power","kappa":k,"q":q}}

inline Json to_json(const WeightSequence& b) {
  Json tail;
  if (const auto* p = b.power_tail())
    tail = Json{{"kind", "power"}, {"kappa", p->kappa}, {"q", p->q}};
  else
    tail = Json{{"kind", "zero"}};
  return Json{{"head", b.head()}, {"tail", tail}};
}

inline WeightSequence sequence_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("head")) detail::parse_fail("sequence needs a \"head\" array");
  const Json& h = j.at("head");
  if (!h.is_array()) detail::parse_fail("\"head\" must be an array");
  std::vector<double> head;
  for (const auto& v : h) head.push_back(detail::number(v, "head entry"));
  if (!j.contains("tail")) return WeightSequence::finite(std::move(head));
  const Json& t = j.at("tail");
  const auto kind = detail::get<std::string>(t, "kind");
  if (kind == "zero") return WeightSequence::finite(std::move(head));
  if (kind == "power")
    return WeightSequence::power(std::move(head), detail::number(t.value("kappa", Json()), "kappa"),
                                 detail::number(t.value("q", Json()), "q"));
  detail::parse_fail("unknown tail kind \"" + kind + "\"");
}

// -- TrigFunction: {"modes":[{"k":[..],"cos":c,"sin":s}, ...]}

inline Json to_json(const pde::TrigFunction& f) {
  Json modes = Json::array();
  for (const auto& [k, cs] : f.modes()) modes.push_back(Json{{"k", k}, {"cos", cs.cos}, {"sin", cs.sin}});
  return Json{{"modes", modes}};
}

inline pde::TrigFunction trig_from_json(const Json& j, std::uint32_t m) {
  pde::TrigFunction f(m);
  if (!j.is_object() || !j.contains("modes") || !j.at("modes").is_array())
    detail::parse_fail("trigonometric function needs a \"modes\" array");
  for (const auto& mode : j.at("modes")) {
    if (!mode.is_object() || !mode.contains("k") || !mode.at("k").is_array())
      detail::parse_fail("each mode needs a \"k\" array");
    pde::Freq k;
    for (const auto& c : mode.at("k")) k.push_back(detail::integer(c, "frequency component"));
    if (k.size() != m) detail::parse_fail("mode frequency has length " + std::to_string(k.size()) + ", expected m");
    const double c = mode.contains("cos") ? detail::number(mode.at("cos"), "cos") : 0.0;
    const double s = mode.contains("sin") ? detail::number(mode.at("sin"), "sin") : 0.0;
    f.add_mode(std::move(k), c, s);
  }
  return f;
}

// -- ProblemSpec: {"m":1,"abar":{...},"psi":[{...}],"f":{...},"r":..,"R":..}

inline Json to_json(const pde::ProblemSpec& spec) {
  Json psi = Json::array();
  for (const auto& p : spec.psi) psi.push_back(to_json(p));
  Json out{{"m", spec.m}, {"abar", to_json(spec.abar)}, {"psi", psi}, {"f", to_json(spec.f)}};
  if (spec.r) out["r"] = *spec.r;
  if (spec.R) out["R"] = *spec.R;
  return out;
}

inline pde::ProblemSpec problem_from_json(const Json& j) {
  pde::ProblemSpec spec;
  const std::int64_t m = detail::integer(j.value("m", Json()), "m");
  if (m < 1 || m > 16) detail::parse_fail("m must lie in 1..16");
  spec.m = static_cast<std::uint32_t>(m);
  if (!j.contains("abar") || !j.contains("f")) detail::parse_fail("problem needs \"abar\" and \"f\"");
  spec.abar = trig_from_json(j.at("abar"), spec.m);
  spec.f = trig_from_json(j.at("f"), spec.m);
  if (j.contains("psi")) {
    if (!j.at("psi").is_array()) detail::parse_fail("\"psi\" must be an array");
    for (const auto& p : j.at("psi")) spec.psi.push_back(trig_from_json(p, spec.m));
  }
  if (j.contains("r")) spec.r = detail::number(j.at("r"), "r");
  if (j.contains("R")) spec.R = detail::number(j.at("R"), "R");
  spec.validate();
  return spec;
}

// -- JSON lines

inline Json field_record(const std::vector<std::int64_t>& k, const MultiIndex& s, double value) {
  return Json{{"k", k}, {"s", to_json(s)}, {"value", value}};
}

inline void write_field_jsonl(std::ostream& os, const CoefficientField& v) {
  for (const auto& [key, val] : v) os << field_record(key.k, key.s, val).dump() << '\n';
}

/// Reads one record per non-empty line. Repeated (k, s) keys are an error.
inline CoefficientField read_field_jsonl(std::istream& is, std::uint32_t m) {
  CoefficientField v(m);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json rec;
    try {
      rec = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("k") || !rec.at("k").is_array() || !rec.contains("s"))
      fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": record needs k, s and value");
    std::vector<std::int64_t> k;
    for (const auto& c : rec.at("k")) k.push_back(detail::integer(c, "frequency component"));
    const MultiIndex s = multiindex_from_json(rec.at("s"));
    const double val = detail::number(rec.value("value", Json()), "value");
    if (k.size() != m) fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": k has the wrong length");
    if (v.get(k, s) != 0.0) fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": duplicate (k, s)");
    v.set(std::move(k), s, val);
  }
  return v;
}

inline void write_cross_jsonl(std::ostream& os, const HyperbolicCross& E) {
  for (const auto& e : E.entries) os << Json{{"k", e.k}, {"s", to_json(e.s)}}.dump() << '\n';
}

}  // namespace hypercross::io
