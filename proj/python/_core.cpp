#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "relim/hard_distributions.hpp"
#include "relim/info_theory.hpp"
#include "relim/io.hpp"
#include "relim/oracles.hpp"
#include "relim/params.hpp"
#include "relim/protocols.hpp"
#include "relim/round_elimination.hpp"

namespace py = pybind11;
using namespace relim;

// Everything crosses the boundary as JSON text or plain values; the Python
// side turns rationals into fractions.Fraction.

namespace {

ParamSchedule schedule(const std::string& params_json) { return params_from_json(json::parse(params_json)); }

std::string sample_instance(const std::string& params_json, int level, std::uint64_t seed, bool tilde) {
  const auto p = schedule(params_json);
  Tape tape(seed);
  json out;
  if (tilde) {
    auto s = sample_gr_tilde(p, level, tape);
    out["instance"] = instance_to_json(s.instance.graph);
    out["sidecar"] = sidecar_json(s.instance, &s.aux, s.collision);
  } else {
    auto h = sample_level(p, level, tape);
    out["instance"] = instance_to_json(h.graph);
    out["sidecar"] = sidecar_json(h, nullptr, false);
  }
  return out.dump();
}

std::string simulate_json(const std::string& instance_json, const std::string& protocol, std::uint64_t seed,
                          int bandwidth) {
  const auto g = instance_from_json(json::parse(instance_json));
  const auto res = simulate(make_protocol(protocol, g.r(), bandwidth), g, Randomness{seed});
  json out{{"triangle", has_triangle(g)}, {"correct", judge(g, res)}, {"yes_count", res.yes_count()},
           {"transcript", transcript_to_jsonl(res.transcript)}};
  return out.dump();
}

std::string elimination_json(const std::string& protocol, const std::string& params_json, std::int64_t trials,
                             std::uint64_t seed, const std::string& strategy, const std::string& fallback,
                             std::int64_t cap) {
  EliminationConfig cfg;
  cfg.params = schedule(params_json);
  cfg.level = cfg.params.top();
  cfg.strategy = strategy == "enum" ? SamplerStrategy::Enumerate : SamplerStrategy::Reject;
  cfg.fallback = fallback == "drop" ? FallbackPolicy::DropMessageConditioning : FallbackPolicy::FailTrial;
  cfg.cap = cap;
  return report_to_json(run_elimination(make_protocol(protocol, cfg.level), cfg, trials, seed)).dump();
}

std::string info_json(const std::string& table_json, const std::string& measure, const std::vector<std::string>& a,
                      const std::vector<std::string>& b, const std::vector<std::string>& c) {
  const auto t = joint_table_from_json(json::parse(table_json));
  json out{{"measure", measure}};
  if (measure == "entropy") out["value"] = entropy(t, a);
  else if (measure == "cond-entropy") out["value"] = cond_entropy(t, a, b);
  else if (measure == "mi") out["value"] = c.empty() ? mutual_info(t, a, b) : cond_mutual_info(t, a, b, c);
  else if (measure == "chain-gap") out["value"] = chain_rule_gap(t, a, b, c);
  else throw std::invalid_argument("unknown measure " + measure);
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "round-elimination toolkit for triangle detection";

  py::register_exception<InfeasibleParams>(m, "InfeasibleParams", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  m.def("protocol_names", &protocol_names);
  m.def("feasibility", [](const std::string& p) { return feasibility_to_json(feasibility_check(schedule(p))).dump(); },
        py::arg("params_json"));
  m.def("sample_instance", &sample_instance, py::arg("params_json"), py::arg("level"), py::arg("seed") = 0,
        py::arg("tilde") = false);
  m.def("simulate", &simulate_json, py::arg("instance_json"), py::arg("protocol"), py::arg("seed") = 0,
        py::arg("bandwidth") = 1);
  m.def("exact_g0_triangle_prob", [](std::int64_t n0) { return exact_g0_triangle_prob(n0).get_str(); });
  m.def(
      "zero_round_optimum",
      [](std::int64_t n0) {
        auto z = zero_round_optimum(n0);
        return py::make_tuple(z.best.get_str(), z.strategies, z.exhaustive, static_cast<int>(z.witness.size()));
      },
      py::arg("n0"));
  m.def(
      "exact_success_g0",
      [](const std::string& protocol, std::int64_t n0) {
        return exact_success(make_protocol(protocol, 0), enumerate_g0(n0)).get_str();
      },
      py::arg("protocol"), py::arg("n0"));
  m.def(
      "collision_rate",
      [](const std::string& p, std::int64_t trials, std::uint64_t seed, int jobs) {
        auto s = schedule(p);
        auto c = collision_rate(s, s.top(), trials, seed, jobs);
        return py::dict(py::arg("frequency") = c.frequency, py::arg("bound") = c.bound, py::arg("sigma") = c.sigma,
                        py::arg("theta") = c.theta,
                        py::arg("exact") = exact_collision_probability(s, s.top()).get_d());
      },
      py::arg("params_json"), py::arg("trials"), py::arg("seed") = 0, py::arg("jobs") = 1);
  m.def("run_elimination", &elimination_json, py::arg("protocol"), py::arg("params_json"), py::arg("trials"),
        py::arg("seed") = 0, py::arg("strategy") = "reject", py::arg("fallback") = "drop", py::arg("cap") = 20000);
  m.def("info", &info_json, py::arg("table_json"), py::arg("measure"), py::arg("a"),
        py::arg("b") = std::vector<std::string>{}, py::arg("c") = std::vector<std::string>{});
  m.def("degradation_bound", &degradation_bound, py::arg("n_prev"), py::arg("s"));
  m.def(
      "bandwidth_bound",
      [](const std::string& n_r, int r) {
        auto t = bandwidth_bound(mpz_class(n_r), r);
        return py::make_tuple(t.bound, t.log2_bound, t.precondition);
      },
      py::arg("n_r"), py::arg("r"));
  m.def(
      "contradiction_chain",
      [](int r, const std::string& n0) {
        auto c = contradiction_chain(r, mpz_class(n0));
        py::list steps;
        for (const auto& s : c.steps) steps.append(py::make_tuple(s.label, s.lhs, s.rhs, s.holds));
        return py::make_tuple(c.all_hold(), steps);
      },
      py::arg("r"), py::arg("n0"));
}
