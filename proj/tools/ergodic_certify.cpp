// ergodic-certify: rate certificates, validation, point synthesis, W1 and the
// float-collapse demonstration. JSON artifacts go to stdout or --output.
// Exit codes: 0 ok, 1 input error or refuted check, 2 budget exceeded.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "float_demo.hpp"

using namespace ergodic;

namespace {

struct Partial : Error {
  Partial(const Error& e, Json progress) : Error(e), progress(std::move(progress)) {}
  Json progress;
};

std::string slurp(const std::string& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::invalid_input, field + ": cannot read file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// inline JSON, or a path to a file holding it
Json json_arg(const std::string& text, const std::string& field) {
  std::size_t i = text.find_first_not_of(" \t\r\n");
  bool inline_json = i != std::string::npos && (text[i] == '{' || text[i] == '[');
  std::string body = inline_json ? text : slurp(text, field);
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::invalid_input, field + ": malformed JSON (" + e.what() + ")");
  }
}

Rational rational_arg(const std::string& s, const std::string& field) { return parse_rational(s, field); }

IdealBall target_arg(SpaceKind s, const std::string& center, const std::string& radius) {
  if (center.empty() && radius.empty()) return whole_space_ball(s);
  if (center.empty() || radius.empty()) fail(ErrorCode::invalid_input, "center: give both --center and --radius");
  Json j{{"space", space_name(s)}, {"center", center}, {"radius", radius}};
  return ball_from_json(j, "target", s);
}

// D certified steps, then the rendering; on a budget failure the certificates
// completed so far are reported
SynthArtifact run_synthesis(const SynthSource& src, const IdealBall& target, std::uint64_t depth, unsigned digits) {
  System sys = System::parse(src.system);
  BCSequence bc = build_sequence(src);
  auto eng = std::make_shared<detail::Synth>(sys.measure(), bc, target);
  std::uint64_t m = 1;
  try {
    for (; m <= depth; ++m) eng->ball(m);
    SynthPoint sp{SpacePoint::circle(Rational(0)), eng->k(), target, eng->lambda0(), eng->certs(depth), eng};
    sp.point = refine_to_point(sys.space(), [eng](unsigned i) { return eng->ball(i + 1); });
    return synth_artifact(src, sp, digits);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::budget_exceeded) throw;
    Json certs = Json::array();
    for (const auto& c : eng->certs(m - 1)) certs.push_back(to_json(c));
    throw Partial(e, Json{{"k", eng->k()}, {"completed_steps", m - 1}, {"certificates", certs}});
  }
}

struct Replay {
  std::string artifact;
  ReplayResult result;
};

Replay replay(const Json& j) {
  std::string kind = jsonio::artifact_of(j);
  ReplayResult r;
  if (kind == "rate-certificate") {
    r = replay_certificate(certificate_from_json(j), true);
  } else if (kind == "validation-report") {
    ValidationArtifact v = validation_from_json(j);
    ReplayResult c = replay_certificate(v.certificate, false);
    r.check(c.ok, "certificate: " + c.reason);
    if (r.ok) {
      ValidationReport again =
          validate_as(System::parse(v.certificate.system), v.certificate, v.report.horizon, v.report.mode);
      r.check(same_report(again, v.report), "recomputed report differs");
    }
  } else if (kind == "synth-point") {
    r = replay_synth(synth_from_json(j));
  } else if (kind == "w1") {
    W1Artifact w = w1_from_json(j);
    W1Artifact again = w1_artifact(w.space, w.mu1, w.mu2);
    r.check(again.result.value == w.result.value, "recomputed W1 value differs");
    std::vector<Rational> a, b;
    for (const auto& x : w.mu1.atoms()) a.push_back(x.weight);
    for (const auto& y : w.mu2.atoms()) b.push_back(y.weight);
    r.check(w.result.plan.has_marginals(a, b), "plan marginals differ from the measures");
    Rational cost = 0;
    for (const auto& [i, k, q] : w.result.plan.triples())
      cost += q * distance(w.mu1.atoms()[i].point, w.mu2.atoms()[k].point);
    r.check(cost == w.result.value, "plan cost differs from the value");
  } else if (kind == "demo-float") {
    FloatDemo d = float_demo_from_json(j);
    r.check(float_demo(d.system, d.x0, d.steps) == d, "recomputed orbits differ");
  } else if (kind == "systems") {
    r.check(j.contains("systems") && j["systems"].is_array() && !j["systems"].empty(), "systems: empty list");
    for (const auto& s : j["systems"]) {
      System sys = System::parse(jsonio::str(jsonio::at(s, "id", "systems[]"), "systems[].id"));
      r.check(jsonio::str(jsonio::at(s, "space", "systems[]"), "systems[].space") == space_name(sys.space()),
              "systems: space of " + sys.id());
    }
  } else {
    fail(ErrorCode::invalid_input, "artifact: unknown kind '" + kind + "'");
  }
  return {kind, r};
}

Json systems_artifact() {
  Json list = Json::array();
  list.push_back({{"id", "doubling"}, {"space", "circle"}, {"measure", "lebesgue"}, {"map", "x -> 2x mod 1"}});
  list.push_back({{"id", "shift:p=1/2"},
                  {"space", "cantor"},
                  {"measure", "bernoulli(p), p the probability of a 1"},
                  {"map", "drop the first bit"},
                  {"selector", "shift:p=num/den with 0 < p < 1"}});
  list.push_back({{"id", "rotation"}, {"space", "circle"}, {"measure", "lebesgue"}, {"map", "x -> x + (sqrt 2 - 1) mod 1"}});
  return Json{{"artifact", "systems"}, {"systems", list}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified ergodic averages: rates, typical points, transport"};
  app.require_subcommand(1);
  std::string output;
  std::uint64_t max_steps = limits().steps, max_cyl = limits().cylinders, max_pieces = limits().pieces,
                max_p = limits().max_p;
  unsigned max_prec = limits().max_precision;
  app.add_option("--output,-o", output, "write the artifact to this file");
  app.add_option("--max-steps", max_steps, "step budget for unbounded searches");
  app.add_option("--max-cylinders", max_cyl, "cylinder enumeration cap");
  app.add_option("--max-pieces", max_pieces, "piecewise-linear piece cap");
  app.add_option("--max-p", max_p, "largest averaging length searched");
  app.add_option("--max-precision", max_prec, "largest precision requested from oracles");

  std::string system, observable, eps, delta, kind = "as-l1", certificate, mode = "exact", space, mu1, mu2, input, x0,
                                   center, radius, schedule = "member:i=0";
  std::uint64_t horizon = 0, depth = 8, count = 2, steps = 64;
  unsigned digits = 6;

  app.add_subcommand("systems", "list the supported systems");

  auto* rate = app.add_subcommand("rate", "certify a convergence rate");
  rate->add_option("--system", system)->required();
  rate->add_option("--observable", observable, "inline JSON or a file")->required();
  rate->add_option("--eps", eps)->required();
  rate->add_option("--delta", delta);
  rate->add_option("--kind", kind, "norm-l1, norm-l2, as-bounded or as-l1");

  auto* validate = app.add_subcommand("validate", "check an almost-sure certificate on [n0, horizon]");
  validate->add_option("--certificate", certificate, "inline JSON or a file")->required();
  validate->add_option("--horizon", horizon)->required();
  validate->add_option("--mode", mode, "exact, exact-cylinder, exact-arc or sampled");

  auto* synth = app.add_subcommand("synthesize", "a point that escapes the windows of one rate sequence");
  synth->add_option("--system", system)->required();
  synth->add_option("--observable", observable, "inline JSON or a file")->required();
  synth->add_option("--schedule", schedule, "member:i=I or dyadic:eps=a/b,delta=c/d");
  synth->add_option("--center", center);
  synth->add_option("--radius", radius);
  synth->add_option("--depth", depth);
  synth->add_option("--digits", digits);

  auto* typical = app.add_subcommand("typical", "a point typical for the first members of F");
  typical->add_option("--system", system)->required();
  typical->add_option("--count", count);
  typical->add_option("--center", center);
  typical->add_option("--radius", radius);
  typical->add_option("--depth", depth);
  typical->add_option("--digits", digits);

  auto* w1 = app.add_subcommand("w1", "exact Wasserstein-1 distance of two finite measures");
  w1->add_option("--space", space)->required();
  w1->add_option("--mu1", mu1, "atom list, inline or a file")->required();
  w1->add_option("--mu2", mu2, "atom list, inline or a file")->required();

  auto* rp = app.add_subcommand("replay", "re-check an emitted artifact from scratch");
  rp->add_option("--input", input, "inline JSON or a file")->required();

  auto* demo = app.add_subcommand("demo-float", "doubling orbit in doubles against the exact orbit");
  demo->add_option("--system", system)->required();
  demo->add_option("--x0", x0)->required();
  demo->add_option("--steps", steps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  limits() = Limits{max_steps, max_cyl, max_pieces, max_prec, max_p};
  auto emit = [&](const Json& j) {
    std::string text = j.dump(2) + "\n";
    if (output.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(output);
    if (!out) fail(ErrorCode::invalid_input, "output: cannot write '" + output + "'");
    out << text;
  };

  try {
    if (app.got_subcommand("systems")) {
      emit(systems_artifact());
      return 0;
    }
    if (app.got_subcommand(rate)) {
      System sys = System::parse(system);
      Observable f = observable_from_json(json_arg(observable, "observable"));
      RateKind k = parse_rate_kind(kind);
      Rational e = rational_arg(eps, "eps");
      Rational d = delta.empty() ? Rational(0) : rational_arg(delta, "delta");
      if ((k == RateKind::as_bounded || k == RateKind::as_l1) && delta.empty())
        fail(ErrorCode::invalid_input, "delta: required for almost-sure rates");
      if (!delta.empty() && sgn(d) <= 0) fail(ErrorCode::invalid_input, "delta: must be positive");
      emit(to_json(certify(sys, f, k, e, d)));
      return 0;
    }
    if (app.got_subcommand(validate)) {
      RateCertificate c = certificate_from_json(json_arg(certificate, "certificate"));
      ReplayResult r = replay_certificate(c, false);
      if (!r.ok) fail(ErrorCode::invalid_input, "certificate: " + r.reason);
      System sys = System::parse(c.system);
      ValidationMode m;
      if (mode == "exact") m = sys.kind() == SystemKind::shift ? ValidationMode::exact_cylinder : ValidationMode::exact_arc;
      else m = parse_validation_mode(mode);
      if (!c.is_as()) fail(ErrorCode::invalid_input, "certificate.kind: validation needs an almost-sure certificate");
      if (horizon < c.n0_or_m)
        fail(ErrorCode::invalid_input, "horizon: " + std::to_string(horizon) + " is below the certificate's n0 = " +
                                           std::to_string(c.n0_or_m) + "; nothing would be checked");
      ValidationArtifact v{c, validate_as(sys, c, horizon, m)};
      emit(to_json(v));
      if (!v.report.ok) {
        std::cerr << "validation refuted the certificate: deviation mass " << to_string(v.report.mass) << " > eps\n";
        return 1;
      }
      return 0;
    }
    if (app.got_subcommand(synth) || app.got_subcommand(typical)) {
      SynthSource src;
      src.system = System::parse(system).id();
      if (app.got_subcommand(synth)) {
        src.kind = "rate";
        src.observable = observable_from_json(json_arg(observable, "observable"));
        src.schedule = SummableSchedule::parse(schedule).name();
      } else {
        if (count < 1 || count > 4096) fail(ErrorCode::invalid_input, "count: must lie in [1, 4096]");
        src.count = count;
      }
      if (depth > 4096) fail(ErrorCode::invalid_input, "depth: at most 4096");
      if (digits > 300) fail(ErrorCode::invalid_input, "digits: at most 300");
      IdealBall t = target_arg(System::parse(system).space(), center, radius);
      emit(to_json(run_synthesis(src, t, depth, digits)));
      return 0;
    }
    if (app.got_subcommand(w1)) {
      SpaceKind s = parse_space(space);
      IdealMeasure a = measure_from_json(json_arg(mu1, "mu1"), s, "mu1");
      IdealMeasure b = measure_from_json(json_arg(mu2, "mu2"), s, "mu2");
      emit(to_json(w1_artifact(s, a, b)));
      return 0;
    }
    if (app.got_subcommand(rp)) {
      Replay r = replay(json_arg(input, "input"));
      Json out{{"artifact", "replay"}, {"of", r.artifact}, {"ok", r.result.ok}};
      if (!r.result.ok) out["reason"] = r.result.reason;
      emit(out);
      if (!r.result.ok) {
        std::cerr << "replay failed: " << r.result.reason << "\n";
        return 1;
      }
      return 0;
    }
    if (app.got_subcommand(demo)) {
      emit(to_json(float_demo(system, rational_arg(x0, "x0"), steps)));
      return 0;
    }
  } catch (const Partial& e) {
    std::cerr << e.what() << "\n";
    Json j{{"error", error_name(e.code())}, {"message", e.what()}, {"partial", e.progress}};
    std::cout << j.dump(2) << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    Json j{{"error", error_name(e.code())}, {"message", e.what()}};
    if (e.code() == ErrorCode::budget_exceeded) j["partial"] = Json::object();
    std::cout << j.dump(2) << "\n";
    return e.code() == ErrorCode::budget_exceeded ? 2 : 1;
  }
  return 1;
}
