#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ergodic/bc.hpp"
#include "ergodic/transport.hpp"

namespace ergodic {

using Json = nlohmann::ordered_json;

// ---- field access with path diagnostics --------------------------------------

namespace jsonio {

inline const Json& at(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(ErrorCode::invalid_input, path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::invalid_input, path + "." + key + ": missing field");
  return *it;
}

inline std::string str(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(ErrorCode::invalid_input, path + ": expected a string");
  return j.get<std::string>();
}

inline Rational rational(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(Integer(j.dump()));
  return parse_rational(str(j, path), path);
}

inline std::uint64_t u64(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    fail(ErrorCode::invalid_input, path + ": expected a non-negative integer");
  return j.get<std::uint64_t>();
}

inline bool boolean(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(ErrorCode::invalid_input, path + ": expected true or false");
  return j.get<bool>();
}

inline const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(ErrorCode::invalid_input, path + ": expected an array");
  return j;
}

inline std::vector<Rational> rationals(const Json& j, const std::string& path) {
  std::vector<Rational> out;
  for (std::size_t i = 0; i < array(j, path).size(); ++i)
    out.push_back(rational(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline Json rationals(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& q : v) a.push_back(to_string(q));
  return a;
}

inline std::string artifact_of(const Json& j) {
  if (!j.is_object() || !j.contains("artifact")) fail(ErrorCode::invalid_input, "artifact: missing field");
  return str(j["artifact"], "artifact");
}

}  // namespace jsonio

// ---- points, balls, measures, plans ----------------------------------------

inline Json to_json(const IdealBall& b) {
  return Json{{"space", space_name(b.center.space)}, {"center", b.center.str()}, {"radius", to_string(b.radius)}};
}

inline IdealBall ball_from_json(const Json& j, const std::string& path, std::optional<SpaceKind> space = std::nullopt) {
  SpaceKind s = j.contains("space") ? parse_space(jsonio::str(j["space"], path + ".space"))
                                    : (space ? *space : SpaceKind::circle);
  if (space && *space != s) fail(ErrorCode::invalid_input, path + ".space: ball from a different space");
  std::string c = jsonio::str(jsonio::at(j, "center", path), path + ".center");
  IdealPoint center = s == SpaceKind::cantor && c == "0" ? IdealPoint::cantor("") : parse_point(s, c, path + ".center");
  Rational r = jsonio::rational(jsonio::at(j, "radius", path), path + ".radius");
  if (sgn(r) <= 0) fail(ErrorCode::invalid_input, path + ".radius: must be positive");
  return {center, r};
}

// [["point", "weight"], ...]
inline Json to_json(const IdealMeasure& mu) {
  Json a = Json::array();
  for (const auto& at : mu.atoms()) a.push_back(Json::array({at.point.str(), to_string(at.weight)}));
  return a;
}

inline IdealMeasure measure_from_json(const Json& j, SpaceKind s, const std::string& path) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < jsonio::array(j, path).size(); ++i) {
    std::string p = path + "[" + std::to_string(i) + "]";
    const Json& a = j[i];
    if (!a.is_array() || a.size() != 2) fail(ErrorCode::invalid_input, p + ": expected [point, weight]");
    std::string pt = jsonio::str(a[0], p + "[0]");
    atoms.push_back({s == SpaceKind::cantor && pt == "0" ? IdealPoint::cantor("") : parse_point(s, pt, p + "[0]"),
                     jsonio::rational(a[1], p + "[1]")});
  }
  try {
    return IdealMeasure(s, std::move(atoms));
  } catch (const Error& e) {
    fail(ErrorCode::invalid_input, path + ": " + e.what());
  }
}

// sparse triples [i, j, "mass"]
inline Json to_json(const TransportPlan& plan) {
  Json a = Json::array();
  for (const auto& [i, j, q] : plan.triples()) a.push_back(Json::array({i, j, to_string(q)}));
  return a;
}

inline TransportPlan plan_from_json(const Json& j, std::size_t rows, std::size_t cols, const std::string& path) {
  TransportPlan plan{rows, cols, std::vector<Rational>(rows * cols, Rational(0))};
  for (std::size_t k = 0; k < jsonio::array(j, path).size(); ++k) {
    std::string p = path + "[" + std::to_string(k) + "]";
    const Json& t = j[k];
    if (!t.is_array() || t.size() != 3) fail(ErrorCode::invalid_input, p + ": expected [i, j, mass]");
    std::uint64_t r = jsonio::u64(t[0], p + "[0]"), c = jsonio::u64(t[1], p + "[1]");
    if (r >= rows || c >= cols) fail(ErrorCode::invalid_input, p + ": index outside the plan");
    plan.at(r, c) = jsonio::rational(t[2], p + "[2]");
  }
  return plan;
}

// ---- observables ------------------------------------------------------------
//
// {"type":"pl", "x":[...], "left":[...], "right":[...]}             segments
// {"type":"pl", "breakpoints":[...], "values":[...], "left_limits":[...]}
// {"type":"cylinder", "depth":d, "table":[...]} or {"type":"cylinder", "indicator":"01"}
// {"type":"term", "space":"circle", "term":{...}} with nodes
//   {"op":"one"}, {"op":"gen","center":c,"r":r,"eps":e}, {"op":"max"|"min","args":[a,b]},
//   {"op":"lin","terms":[["coef", node], ...]}
// {"type":"constant", "value":"c"} and {"type":"enumerated", "space":s, "index":i}
// also parse; both are emitted as terms.

inline Json to_json(const FTerm& t) {
  switch (t.kind()) {
    case FTerm::Kind::one: return Json{{"op", "one"}};
    case FTerm::Kind::gen: {
      const auto& g = t.generator();
      return Json{{"op", "gen"}, {"center", g.s.str()}, {"r", to_string(g.r)}, {"eps", to_string(g.eps)}};
    }
    case FTerm::Kind::max:
    case FTerm::Kind::min:
      return Json{{"op", t.kind() == FTerm::Kind::max ? "max" : "min"}, {"args", {to_json(t.kids()[0]), to_json(t.kids()[1])}}};
    case FTerm::Kind::lin: {
      Json terms = Json::array();
      for (std::size_t i = 0; i < t.kids().size(); ++i) terms.push_back(Json::array({to_string(t.coefs()[i]), to_json(t.kids()[i])}));
      return Json{{"op", "lin"}, {"terms", terms}};
    }
  }
  return {};
}

inline SpaceKind term_space(const FTerm& t) {
  if (t.kind() == FTerm::Kind::gen) return t.generator().s.space;
  for (const auto& k : t.kids()) {
    if (k.kind() != FTerm::Kind::one) return term_space(k);
  }
  return SpaceKind::circle;
}

inline FTerm term_from_json(const Json& j, SpaceKind s, const std::string& path) {
  std::string op = jsonio::str(jsonio::at(j, "op", path), path + ".op");
  if (op == "one") return FTerm::one();
  if (op == "gen") {
    std::string c = jsonio::str(jsonio::at(j, "center", path), path + ".center");
    IdealPoint center = s == SpaceKind::cantor && c == "0" ? IdealPoint::cantor("") : parse_point(s, c, path + ".center");
    Rational r = jsonio::rational(jsonio::at(j, "r", path), path + ".r");
    Rational e = jsonio::rational(jsonio::at(j, "eps", path), path + ".eps");
    if (sgn(r) <= 0) fail(ErrorCode::invalid_input, path + ".r: must be positive");
    if (sgn(e) <= 0) fail(ErrorCode::invalid_input, path + ".eps: must be positive");
    return FTerm::gen(center, r, e);
  }
  if (op == "max" || op == "min") {
    const Json& a = jsonio::array(jsonio::at(j, "args", path), path + ".args");
    if (a.size() != 2) fail(ErrorCode::invalid_input, path + ".args: expected two operands");
    FTerm x = term_from_json(a[0], s, path + ".args[0]"), y = term_from_json(a[1], s, path + ".args[1]");
    return op == "max" ? FTerm::max(x, y) : FTerm::min(x, y);
  }
  if (op == "lin") {
    const Json& a = jsonio::array(jsonio::at(j, "terms", path), path + ".terms");
    if (a.empty()) fail(ErrorCode::invalid_input, path + ".terms: empty combination");
    std::vector<std::pair<Rational, FTerm>> terms;
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::string p = path + ".terms[" + std::to_string(i) + "]";
      if (!a[i].is_array() || a[i].size() != 2) fail(ErrorCode::invalid_input, p + ": expected [coef, term]");
      terms.emplace_back(jsonio::rational(a[i][0], p + "[0]"), term_from_json(a[i][1], s, p + "[1]"));
    }
    return FTerm::lin(std::move(terms));
  }
  fail(ErrorCode::invalid_input, path + ".op: unknown operator '" + op + "'");
}

inline Json to_json(const Observable& f) {
  if (auto* p = std::get_if<Pl>(&f))
    return Json{{"type", "pl"}, {"x", jsonio::rationals(p->xs())}, {"left", jsonio::rationals(p->lefts())},
                {"right", jsonio::rationals(p->rights())}};
  if (auto* c = std::get_if<CylFn>(&f))
    return Json{{"type", "cylinder"}, {"depth", c->depth()}, {"table", jsonio::rationals(c->table())}};
  const FTerm& t = std::get<FTerm>(f);
  return Json{{"type", "term"}, {"space", space_name(term_space(t))}, {"term", to_json(t)}};
}

inline Observable observable_from_json(const Json& j, const std::string& path = "observable") {
  std::string type = jsonio::str(jsonio::at(j, "type", path), path + ".type");
  auto wrap = [&](auto&& make) -> Observable {
    try {
      return make();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::invalid_input) throw;
      std::string msg = e.what();
      if (msg.rfind("INVALID_INPUT: ", 0) == 0) msg = msg.substr(15);
      fail(ErrorCode::invalid_input, path + "." + msg);
    }
  };
  if (type == "pl") {
    if (j.contains("x")) {
      auto x = jsonio::rationals(j["x"], path + ".x");
      auto l = jsonio::rationals(jsonio::at(j, "left", path), path + ".left");
      auto r = jsonio::rationals(jsonio::at(j, "right", path), path + ".right");
      return wrap([&] { return Pl(x, l, r); });
    }
    auto b = jsonio::rationals(jsonio::at(j, "breakpoints", path), path + ".breakpoints");
    auto v = jsonio::rationals(jsonio::at(j, "values", path), path + ".values");
    auto ll = j.contains("left_limits") ? jsonio::rationals(j["left_limits"], path + ".left_limits") : v;
    return wrap([&] { return Pl::from_nodes(b, v, ll); });
  }
  if (type == "cylinder") {
    if (j.contains("indicator")) {
      Word w = parse_word(jsonio::str(j["indicator"], path + ".indicator"), path + ".indicator");
      if (w.size() > 24) fail(ErrorCode::invalid_input, path + ".indicator: word longer than 24");
      return CylFn::indicator(w);
    }
    std::uint64_t d = jsonio::u64(jsonio::at(j, "depth", path), path + ".depth");
    if (d > 24) fail(ErrorCode::invalid_input, path + ".depth: above 24");
    auto t = jsonio::rationals(jsonio::at(j, "table", path), path + ".table");
    if (t.size() != (std::size_t(1) << d)) fail(ErrorCode::invalid_input, path + ".table: needs 2^depth entries");
    return CylFn(d, std::move(t));
  }
  if (type == "term") {
    SpaceKind s = j.contains("space") ? parse_space(jsonio::str(j["space"], path + ".space")) : SpaceKind::circle;
    return term_from_json(jsonio::at(j, "term", path), s, path + ".term");
  }
  if (type == "constant") {
    Rational c = jsonio::rational(jsonio::at(j, "value", path), path + ".value");
    return FTerm::lin({{c, FTerm::one()}});
  }
  if (type == "enumerated") {
    SpaceKind s = j.contains("space") ? parse_space(jsonio::str(j["space"], path + ".space")) : SpaceKind::circle;
    std::uint64_t i = jsonio::u64(jsonio::at(j, "index", path), path + ".index");
    if (i >= 4096) fail(ErrorCode::invalid_input, path + ".index: above 4095");
    return enumerate_F(s, i + 1)[i];
  }
  fail(ErrorCode::invalid_input, path + ".type: unknown observable type '" + type + "'");
}

// ---- certificates and reports -------------------------------------------------

inline Json to_json(const RateCertificate& c) {
  Json j{{"artifact", "rate-certificate"},
         {"kind", rate_kind_name(c.kind)},
         {"system", c.system},
         {"observable", to_json(c.observable)},
         {"eps", to_string(c.eps)},
         {"delta", to_string(c.delta)},
         {"integral", to_string(c.integral)},
         {"p", c.p},
         {"norm_p", {to_string(c.norm_p.lo), to_string(c.norm_p.hi)}},
         {"f_norm", to_string(c.f_norm)},
         {"n", c.n},
         {"sup", to_string(c.sup)},
         {c.is_as() ? "n0" : "m", c.n0_or_m},
         {"M", to_string(c.M)},
         {"tail", to_string(c.tail)},
         {"shift", to_string(c.shift)},
         {"delta2", to_string(c.delta2)},
         {"maximal", to_string(c.maximal)},
         {"guarantee", c.guarantee()}};
  if (c.sub) j["sub"] = to_json(*c.sub);
  return j;
}

inline RateCertificate certificate_from_json(const Json& j, const std::string& path = "certificate") {
  using namespace jsonio;
  RateCertificate c;
  c.kind = parse_rate_kind(str(at(j, "kind", path), path + ".kind"));
  c.system = str(at(j, "system", path), path + ".system");
  System::parse(c.system);
  c.observable = observable_from_json(at(j, "observable", path), path + ".observable");
  c.eps = rational(at(j, "eps", path), path + ".eps");
  c.delta = rational(at(j, "delta", path), path + ".delta");
  c.integral = rational(at(j, "integral", path), path + ".integral");
  c.p = u64(at(j, "p", path), path + ".p");
  const Json& np = array(at(j, "norm_p", path), path + ".norm_p");
  if (np.size() != 2) fail(ErrorCode::invalid_input, path + ".norm_p: expected [lo, hi]");
  c.norm_p = {rational(np[0], path + ".norm_p[0]"), rational(np[1], path + ".norm_p[1]")};
  c.f_norm = rational(at(j, "f_norm", path), path + ".f_norm");
  c.n = u64(at(j, "n", path), path + ".n");
  c.sup = rational(at(j, "sup", path), path + ".sup");
  const char* key = c.is_as() ? "n0" : "m";
  c.n0_or_m = u64(at(j, key, path), path + "." + key);
  c.M = rational(at(j, "M", path), path + ".M");
  c.tail = rational(at(j, "tail", path), path + ".tail");
  c.shift = rational(at(j, "shift", path), path + ".shift");
  c.delta2 = rational(at(j, "delta2", path), path + ".delta2");
  c.maximal = rational(at(j, "maximal", path), path + ".maximal");
  if (j.contains("sub")) c.sub = std::make_shared<const RateCertificate>(certificate_from_json(j["sub"], path + ".sub"));
  return c;
}

inline bool same_certificate(const RateCertificate& a, const RateCertificate& b) {
  bool subs = (!a.sub && !b.sub) || (a.sub && b.sub && same_certificate(*a.sub, *b.sub));
  return subs && a.kind == b.kind && a.system == b.system && a.observable == b.observable && a.eps == b.eps &&
         a.delta == b.delta && a.integral == b.integral && a.p == b.p && a.norm_p == b.norm_p && a.f_norm == b.f_norm &&
         a.n == b.n && a.sup == b.sup && a.n0_or_m == b.n0_or_m && a.M == b.M && a.tail == b.tail &&
         a.shift == b.shift && a.delta2 == b.delta2 && a.maximal == b.maximal;
}

struct ValidationArtifact {
  RateCertificate certificate;
  ValidationReport report;
};

inline Json to_json(const ValidationReport& r) {
  return Json{{"mode", validation_mode_name(r.mode)},
              {"n0", r.n0},
              {"horizon", r.horizon},
              {"delta", to_string(r.delta)},
              {"eps", to_string(r.eps)},
              {"mass", to_string(r.mass)},
              {"upper_bound", r.upper_bound},
              {"samples", r.samples},
              {"hits", r.hits},
              {"asserted", r.asserted},
              {"ok", r.ok}};
}

inline ValidationReport report_from_json(const Json& j, const std::string& path = "report") {
  using namespace jsonio;
  ValidationReport r;
  r.mode = parse_validation_mode(str(at(j, "mode", path), path + ".mode"));
  r.n0 = u64(at(j, "n0", path), path + ".n0");
  r.horizon = u64(at(j, "horizon", path), path + ".horizon");
  r.delta = rational(at(j, "delta", path), path + ".delta");
  r.eps = rational(at(j, "eps", path), path + ".eps");
  r.mass = rational(at(j, "mass", path), path + ".mass");
  r.upper_bound = boolean(at(j, "upper_bound", path), path + ".upper_bound");
  r.samples = u64(at(j, "samples", path), path + ".samples");
  r.hits = u64(at(j, "hits", path), path + ".hits");
  r.asserted = boolean(at(j, "asserted", path), path + ".asserted");
  r.ok = boolean(at(j, "ok", path), path + ".ok");
  return r;
}

inline bool same_report(const ValidationReport& a, const ValidationReport& b) {
  return a.mode == b.mode && a.n0 == b.n0 && a.horizon == b.horizon && a.delta == b.delta && a.eps == b.eps &&
         a.mass == b.mass && a.upper_bound == b.upper_bound && a.samples == b.samples && a.hits == b.hits &&
         a.asserted == b.asserted && a.ok == b.ok;
}

inline Json to_json(const ValidationArtifact& v) {
  return Json{{"artifact", "validation-report"}, {"report", to_json(v.report)}, {"certificate", to_json(v.certificate)}};
}

inline ValidationArtifact validation_from_json(const Json& j) {
  return {certificate_from_json(jsonio::at(j, "certificate", "validation"), "validation.certificate"),
          report_from_json(jsonio::at(j, "report", "validation"), "validation.report")};
}

// ---- W1 ---------------------------------------------------------------------

struct W1Artifact {
  SpaceKind space = SpaceKind::circle;
  IdealMeasure mu1 = IdealMeasure::dirac(IdealPoint::circle(Rational(0)));
  IdealMeasure mu2 = IdealMeasure::dirac(IdealPoint::circle(Rational(0)));
  TransportResult result;
};

inline W1Artifact w1_artifact(SpaceKind s, const IdealMeasure& mu1, const IdealMeasure& mu2) {
  return {s, mu1, mu2, w1_ideal(mu1, mu2)};
}

inline Json to_json(const W1Artifact& w) {
  return Json{{"artifact", "w1"},
              {"space", space_name(w.space)},
              {"mu1", to_json(w.mu1)},
              {"mu2", to_json(w.mu2)},
              {"value", to_string(w.result.value)},
              {"plan", to_json(w.result.plan)}};
}

inline W1Artifact w1_from_json(const Json& j) {
  SpaceKind s = parse_space(jsonio::str(jsonio::at(j, "space", "w1"), "w1.space"));
  IdealMeasure a = measure_from_json(jsonio::at(j, "mu1", "w1"), s, "w1.mu1");
  IdealMeasure b = measure_from_json(jsonio::at(j, "mu2", "w1"), s, "w1.mu2");
  TransportResult r{jsonio::rational(jsonio::at(j, "value", "w1"), "w1.value"),
                    plan_from_json(jsonio::at(j, "plan", "w1"), a.size(), b.size(), "w1.plan")};
  return {s, a, b, r};
}

inline bool same_measure(const IdealMeasure& a, const IdealMeasure& b) {
  if (a.space() != b.space() || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a.atoms()[i].point == b.atoms()[i].point) || a.atoms()[i].weight != b.atoms()[i].weight) return false;
  return true;
}

inline bool same_w1(const W1Artifact& a, const W1Artifact& b) {
  return a.space == b.space && same_measure(a.mu1, b.mu1) && same_measure(a.mu2, b.mu2) &&
         a.result.value == b.result.value && a.result.plan.rows == b.result.plan.rows &&
         a.result.plan.cols == b.result.plan.cols && a.result.plan.flow == b.result.plan.flow;
}

// ---- synthesized points -----------------------------------------------------

// Where the sequence came from, enough to rebuild it for replay.
struct SynthSource {
  std::string kind = "typical";  // "typical" or "rate"
  std::string system = "rotation";
  std::uint64_t count = 1;                // typical: members of F intersected
  std::optional<Observable> observable;  // rate
  std::string schedule;                  // rate
  bool operator==(const SynthSource&) const = default;
};

inline BCSequence build_sequence(const SynthSource& src) {
  System sys = System::parse(src.system);
  if (src.kind == "typical") {
    require(src.count >= 1 && src.count <= 4096, "source.count: must lie in [1, 4096]");
    auto F = enumerate_F(sys.space(), src.count);
    std::vector<BCSequence> family;
    for (std::size_t i = 0; i < F.size(); ++i)
      family.push_back(RateBC(sys, F[i], SummableSchedule::member(i), i).sequence());
    return bc_intersect(std::move(family));
  }
  if (src.kind == "rate") {
    require(src.observable.has_value(), "source.observable: missing field");
    return bc_from_rate(sys, *src.observable, SummableSchedule::parse(src.schedule));
  }
  fail(ErrorCode::invalid_input, "source.kind: expected typical or rate, got '" + src.kind + "'");
}

struct SynthArtifact {
  SpaceKind space = SpaceKind::circle;
  SynthSource source;
  IdealBall target;
  std::uint64_t k = 0;
  Rational lambda0;
  unsigned digits = 0;
  std::string rendering;  // circle: decimal, rounded; Cantor: the first `digits` bits
  std::vector<MembershipCert> certs;
  bool operator==(const SynthArtifact&) const = default;
};

// decimal to d digits within 10^-d of the point: an enclosure of half-width
// at most 10^-d / 2 and rounding to nearest
inline std::string render_point(const SpacePoint& x, unsigned d) {
  if (x.space() == SpaceKind::cantor) return x.prefix(d);
  Integer ten;
  mpz_ui_pow_ui(ten.get_mpz_t(), 10, d);
  Rational half_ulp = Rational(1) / Rational(ten) / 2;
  unsigned m = 1;
  while (pow2(-static_cast<long>(m)) > half_ulp) ++m;
  Interval a = x.arc(m + 1);  // width <= 2^-m
  Rational c = (a.lo + a.hi) / 2;
  return to_decimal(frac(c + half_ulp), d);  // points just below 1 wrap to 0
}

inline SynthArtifact synth_artifact(const SynthSource& src, const SynthPoint& sp, unsigned digits) {
  require(digits <= 300, "digits: at most 300");
  return {sp.target.center.space, src, sp.target, sp.k, sp.lambda0, digits, render_point(sp.point, digits), sp.certs};
}

inline Json to_json(const MembershipCert& c) {
  return Json{{"index", c.index},   {"step", c.step},           {"prefix", c.prefix},
              {"position", c.position}, {"witness", to_json(c.witness)}, {"ball", to_json(c.ball)},
              {"J", c.J},           {"lambda", to_string(c.lambda)}};
}

inline Json to_json(const SynthSource& s) {
  Json j{{"kind", s.kind}, {"system", s.system}};
  if (s.kind == "typical") j["count"] = s.count;
  if (s.observable) j["observable"] = to_json(*s.observable);
  if (!s.schedule.empty()) j["schedule"] = s.schedule;
  return j;
}

inline Json to_json(const SynthArtifact& a) {
  Json certs = Json::array();
  for (const auto& c : a.certs) certs.push_back(to_json(c));
  Integer ten;
  mpz_ui_pow_ui(ten.get_mpz_t(), 10, a.digits);
  Json j{{"artifact", "synth-point"},
         {"space", space_name(a.space)},
         {"source", to_json(a.source)},
         {"target", to_json(a.target)},
         {"k", a.k},
         {"lambda0", to_string(a.lambda0)},
         {"digits", a.digits}};
  if (a.space == SpaceKind::circle) {
    j["decimal"] = a.rendering;
    j["error_bound"] = to_string(Rational(1) / Rational(ten));
  } else {
    j["bits"] = a.rendering;
  }
  j["certificates"] = certs;
  return j;
}

inline SynthArtifact synth_from_json(const Json& j) {
  using namespace jsonio;
  const std::string P = "synth";
  SynthArtifact a;
  a.space = parse_space(str(at(j, "space", P), P + ".space"));
  const Json& s = at(j, "source", P);
  a.source.kind = str(at(s, "kind", P + ".source"), P + ".source.kind");
  a.source.system = str(at(s, "system", P + ".source"), P + ".source.system");
  if (System::parse(a.source.system).space() != a.space)
    fail(ErrorCode::invalid_input, P + ".source.system: lives on a different space");
  if (a.source.kind == "typical") a.source.count = u64(at(s, "count", P + ".source"), P + ".source.count");
  if (s.contains("observable")) a.source.observable = observable_from_json(s["observable"], P + ".source.observable");
  if (s.contains("schedule")) a.source.schedule = str(s["schedule"], P + ".source.schedule");
  a.target = ball_from_json(at(j, "target", P), P + ".target", a.space);
  a.k = u64(at(j, "k", P), P + ".k");
  a.lambda0 = rational(at(j, "lambda0", P), P + ".lambda0");
  std::uint64_t d = u64(at(j, "digits", P), P + ".digits");
  if (d > 300) fail(ErrorCode::invalid_input, P + ".digits: at most 300");
  a.digits = static_cast<unsigned>(d);
  a.rendering = str(at(j, a.space == SpaceKind::circle ? "decimal" : "bits", P),
                    P + (a.space == SpaceKind::circle ? ".decimal" : ".bits"));
  const Json& cs = array(at(j, "certificates", P), P + ".certificates");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    std::string p = P + ".certificates[" + std::to_string(i) + "]";
    MembershipCert c;
    c.index = u64(at(cs[i], "index", p), p + ".index");
    c.step = u64(at(cs[i], "step", p), p + ".step");
    c.prefix = u64(at(cs[i], "prefix", p), p + ".prefix");
    c.position = u64(at(cs[i], "position", p), p + ".position");
    c.witness = ball_from_json(at(cs[i], "witness", p), p + ".witness", a.space);
    c.ball = ball_from_json(at(cs[i], "ball", p), p + ".ball", a.space);
    c.J = u64(at(cs[i], "J", p), p + ".J");
    c.lambda = rational(at(cs[i], "lambda", p), p + ".lambda");
    a.certs.push_back(c);
  }
  return a;
}

// The chain is re-checked against a freshly built sequence; the rendering must
// be consistent with the deepest certified ball.
inline ReplayResult replay_synth(const SynthArtifact& a) {
  BCSequence bc = build_sequence(a.source);
  ComputableMeasure mu = System::parse(a.source.system).measure();
  ReplayResult r = replay_synthesis(mu, bc, a.target, a.k, a.lambda0, a.certs);
  if (!r.ok) return r;
  const IdealBall& last = a.certs.empty() ? a.target : a.certs.back().ball;
  if (a.space == SpaceKind::circle) {
    Integer ten;
    mpz_ui_pow_ui(ten.get_mpz_t(), 10, a.digits);
    Rational dec = parse_decimal(a.rendering, "decimal");
    r.check(last.radius > Rational(1, 2) ||
                circle_distance(frac(dec), last.center.x) < last.radius + Rational(1) / Rational(ten),
            "decimal rendering outside the last certified ball");
  } else {
    Word w = cylinder_word(last);
    std::size_t n = std::min(w.size(), a.rendering.size());
    r.check(a.rendering.size() == a.digits && a.rendering.compare(0, n, w, 0, n) == 0,
            "bit rendering disagrees with the last certified cylinder");
  }
  return r;
}

}  // namespace ergodic
