#pragma once

// The one place binary floating point appears: the doubling orbit of a
// rational start computed in doubles next to the exact orbit.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "ergodic/io.hpp"

namespace ergodic {

struct FloatDemo {
  std::string system = "doubling";
  Rational x0;
  std::uint64_t steps = 0;
  std::vector<std::string> float_orbit;  // hex-float rendering of each iterate
  std::optional<std::uint64_t> float_zero_step;
  std::uint64_t preperiod = 0, period = 0;
  std::vector<Rational> exact_cycle;
  bool exact_hits_zero = false;
  bool operator==(const FloatDemo&) const = default;
};

inline std::string hex_float(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

inline FloatDemo float_demo(const std::string& system, const Rational& x0, std::uint64_t steps) {
  require(system == "doubling", "system: the demonstration runs on doubling");
  require(sgn(x0) >= 0 && x0 < 1, "x0: must lie in [0,1)");
  require(steps >= 1 && steps <= 4096, "steps: must lie in [1, 4096]");
  FloatDemo d{system, x0, steps, {}, std::nullopt, 0, 0, {}, false};
  double x = x0.get_d();
  d.float_orbit.push_back(hex_float(x));
  for (std::uint64_t n = 1; n <= steps; ++n) {
    x = 2 * x;
    if (x >= 1) x -= 1;
    d.float_orbit.push_back(hex_float(x));
    if (x == 0 && !d.float_zero_step) d.float_zero_step = n;
  }
  // the exact orbit of p/q is eventually periodic with at most q distinct values
  std::map<Rational, std::uint64_t> seen;
  std::vector<Rational> orbit;
  Rational y = x0;
  StepBudget budget;
  while (!seen.count(y)) {
    budget.charge(1, "exact orbit");
    seen.emplace(y, orbit.size());
    orbit.push_back(y);
    if (sgn(y) == 0) d.exact_hits_zero = true;
    y = frac(2 * y);
  }
  d.preperiod = seen[y];
  d.period = orbit.size() - d.preperiod;
  d.exact_cycle.assign(orbit.begin() + static_cast<std::ptrdiff_t>(d.preperiod), orbit.end());
  return d;
}

inline Json to_json(const FloatDemo& d) {
  Json fz = d.float_zero_step ? Json(*d.float_zero_step) : Json(nullptr);
  return Json{{"artifact", "demo-float"},
              {"system", d.system},
              {"x0", to_string(d.x0)},
              {"steps", d.steps},
              {"float", {{"orbit", d.float_orbit}, {"zero_step", fz}}},
              {"exact", {{"preperiod", d.preperiod},
                         {"period", d.period},
                         {"cycle", jsonio::rationals(d.exact_cycle)},
                         {"hits_zero", d.exact_hits_zero}}}};
}

inline FloatDemo float_demo_from_json(const Json& j) {
  using namespace jsonio;
  FloatDemo d;
  d.system = str(at(j, "system", "demo"), "demo.system");
  d.x0 = rational(at(j, "x0", "demo"), "demo.x0");
  d.steps = u64(at(j, "steps", "demo"), "demo.steps");
  const Json& f = at(j, "float", "demo");
  for (const auto& s : array(at(f, "orbit", "demo.float"), "demo.float.orbit")) d.float_orbit.push_back(str(s, "demo.float.orbit"));
  const Json& z = at(f, "zero_step", "demo.float");
  if (!z.is_null()) d.float_zero_step = u64(z, "demo.float.zero_step");
  const Json& e = at(j, "exact", "demo");
  d.preperiod = u64(at(e, "preperiod", "demo.exact"), "demo.exact.preperiod");
  d.period = u64(at(e, "period", "demo.exact"), "demo.exact.period");
  d.exact_cycle = rationals(at(e, "cycle", "demo.exact"), "demo.exact.cycle");
  d.exact_hits_zero = boolean(at(e, "hits_zero", "demo.exact"), "demo.exact.hits_zero");
  return d;
}

}  // namespace ergodic
