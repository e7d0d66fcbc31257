#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "relim/hard_distributions.hpp"
#include "relim/info_theory.hpp"
#include "relim/io.hpp"
#include "relim/oracles.hpp"
#include "relim/params.hpp"
#include "relim/protocols.hpp"
#include "relim/round_elimination.hpp"

using namespace relim;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kInvalid = 1, kInfeasible = 2;

std::uint64_t default_seed() {
  if (const char* s = std::getenv("RELIM_SEED")) return std::stoull(s);
  return 0;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return json::parse(in);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  if (auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Common {
  std::uint64_t seed = default_seed();
  int jobs = 1;
};

struct GenArgs {
  int level = 0;
  std::string params, out = "instances", dist = "g";
  std::int64_t count = 1;
};

int run_gen(const GenArgs& a, const Common& c) {
  const auto p = params_from_json(read_json(a.params));
  if (a.level < 0 || a.level > p.top()) throw std::invalid_argument("level outside the schedule");
  if (a.dist == "gtilde" && a.level < 1) throw std::invalid_argument("gtilde needs level >= 1");
  fs::create_directories(a.out);
  json config{{"subcommand", "gen"}, {"level", a.level}, {"params", params_to_json(p)}, {"seed", c.seed},
              {"count", a.count}, {"distribution", a.dist}};
  for (std::int64_t k = 0; k < a.count; ++k) {
    Tape tape(mix_keys({c.seed, static_cast<std::uint64_t>(k)}));
    json side;
    TypedTripartiteGraph g;
    if (a.dist == "gtilde") {
      auto s = sample_gr_tilde(p, a.level, tape);
      side = sidecar_json(s.instance, &s.aux, s.collision);
      side["theta"] = s.theta;
      g = s.instance.graph;
    } else {
      auto h = sample_level(p, a.level, tape);
      side = sidecar_json(h, nullptr, false);
      g = h.graph;
    }
    side["config"] = config;
    side["index"] = k;
    const std::string stem = (fs::path(a.out) / ("instance_" + std::to_string(k))).string();
    write_text(stem + ".json", instance_to_json(g).dump() + "\n");
    write_json(stem + ".sidecar.json", side);
  }
  std::cout << "wrote " << a.count << " instance(s) to " << a.out << "\n";
  return kOk;
}

struct SimArgs {
  std::string instance, protocol, dump, out;
  int bandwidth = 1;
};

int run_simulate(const SimArgs& a, const Common& c) {
  const auto g = instance_from_json(read_json(a.instance));
  const auto pi = make_protocol(a.protocol, g.r(), a.bandwidth);
  const auto res = simulate(pi, g, Randomness{c.seed});
  if (!a.dump.empty()) write_text(a.dump, transcript_to_jsonl(res.transcript));
  json j{{"config", {{"subcommand", "simulate"}, {"instance", a.instance}, {"protocol", a.protocol},
                     {"bandwidth", a.bandwidth}, {"seed", c.seed}}},
         {"triangle", has_triangle(g)},
         {"yes_count", res.yes_count()},
         {"correct", judge(g, res)},
         {"messages", res.transcript.entries.size()},
         {"max_len", res.transcript.max_len()}};
  write_json(a.out, j);
  return kOk;
}

struct EstArgs {
  std::string protocol, params, out;
  int level = -1, bandwidth = 1;
  std::int64_t trials = 1000;
};

int run_estimate(const EstArgs& a, const Common& c) {
  const auto p = params_from_json(read_json(a.params));
  const int level = a.level < 0 ? p.top() : a.level;
  const auto pi = make_protocol(a.protocol, level, a.bandwidth);
  auto est = estimate_success(pi, [&](Tape& t) { return sample_level(p, level, t).graph; }, a.trials, c.seed, c.jobs);
  json j{{"config", {{"subcommand", "estimate-success"}, {"protocol", a.protocol}, {"params", params_to_json(p)},
                     {"level", level}, {"trials", a.trials}, {"seed", c.seed}, {"bandwidth", a.bandwidth}}},
         {"successes", est.successes},
         {"trials", est.trials},
         {"frequency", est.frequency},
         {"wilson95", {est.lo, est.hi}}};
  write_json(a.out, j);
  return kOk;
}

struct ElimArgs {
  std::string protocol, params, out = "elim", strategy = "reject", fallback = "fail";
  int level = -1, bandwidth = 1;
  std::int64_t trials = 100, cap = 1'000'000, hybrids = 0;
};

int run_round_elim(const ElimArgs& a, const Common& c) {
  const auto p = params_from_json(read_json(a.params));
  EliminationConfig cfg;
  cfg.params = p;
  cfg.level = a.level < 0 ? p.top() : a.level;
  cfg.strategy = a.strategy == "enum" ? SamplerStrategy::Enumerate : SamplerStrategy::Reject;
  cfg.fallback = a.fallback == "drop" ? FallbackPolicy::DropMessageConditioning : FallbackPolicy::FailTrial;
  cfg.cap = a.cap;
  const auto pi = make_protocol(a.protocol, cfg.level, a.bandwidth);
  std::vector<TrialRecord> recs;
  const auto rep = run_elimination(pi, cfg, a.trials, c.seed, &recs);
  fs::create_directories(a.out);
  json config{{"subcommand", "round-elim"}, {"protocol", a.protocol}, {"params", params_to_json(p)},
              {"level", cfg.level}, {"trials", a.trials}, {"seed", c.seed}, {"strategy", strategy_name(cfg.strategy)},
              {"fallback", fallback_name(cfg.fallback)}, {"cap", a.cap}, {"bandwidth", a.bandwidth},
              {"hybrids", a.hybrids}};
  json rj = report_to_json(rep);
  rj["config"] = config;
  write_json((fs::path(a.out) / "report.json").string(), rj);
  std::ostringstream csv;
  csv << "trial,triangle,success,fallback,yes_count\n";
  for (const auto& r : recs) csv << r.trial << ',' << r.triangle << ',' << r.success << ',' << r.fallback << ',' << r.yes_count << '\n';
  write_text((fs::path(a.out) / "trials.csv").string(), csv.str());
  if (a.hybrids > 0) {
    std::ostringstream hs;
    for (auto h : {Hybrid::DTildeReal, Hybrid::H1, Hybrid::H2, Hybrid::DFake}) {
      for (std::int64_t k = 0; k < a.hybrids; ++k) {
        Tape tape(mix_keys({c.seed, 0x4859425244ULL, static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(k)}));
        auto s = hybrid_sampler(h, pi, cfg, tape);
        json line{{"hybrid", hybrid_name(h)}, {"sample", k}, {"collision", s.collision},
                  {"fallback", s.fallback}, {"consistent", s.consistent},
                  {"messages", s.round1.entries.size()}};
        json msgs = json::array();
        for (const auto& [key, b] : s.round1.entries) {
          msgs.push_back({{"round", key.round}, {"from", key.from.str()}, {"to", key.to.str()},
                          {"bits", bits_to_hex(b)}, {"len", b.size()}});
        }
        line["transcript"] = msgs;
        hs << line.dump() << '\n';
      }
    }
    write_text((fs::path(a.out) / "hybrids.jsonl").string(), hs.str());
  }
  std::cout << rj.dump(2) << "\n";
  return kOk;
}

json check(const std::string& name, bool pass, json detail) {
  return json{{"check", name}, {"pass", pass}, {"detail", std::move(detail)}};
}

json suite_g0() {
  json out = json::array();
  for (std::int64_t n0 : {1, 2, 3}) {
    auto t = exact_g0_triangle_prob(n0);
    out.push_back(check("triangle_prob_n0_" + std::to_string(n0), t == mpq_class(1, 8), {{"value", t.get_str()}}));
  }
  auto z = zero_round_optimum(1);
  out.push_back(check("zero_round_optimum_n0_1", z.best == mpq_class(7, 8) && z.strategies == 4096 && z.witness.empty(),
                      {{"value", z.best.get_str()}, {"strategies", z.strategies}}));
  auto z2 = zero_round_optimum(2);
  out.push_back(check("zero_round_optimum_n0_2", z2.best == mpq_class(7, 8), {{"value", z2.best.get_str()}}));
  auto yes = exact_success(make_protocol("always-yes", 0), enumerate_g0(2));
  out.push_back(check("always_yes_success", yes == mpq_class(1, 8), {{"value", yes.get_str()}}));
  return out;
}

json suite_info(std::uint64_t seed) {
  json out = json::array();
  Tape tape(mix_keys({seed, 0x494e464f}));
  double worst_gap = 0, worst_slack = 1;
  for (int k = 0; k < 200; ++k) {
    auto j = random_table({"A", "B", "C"}, {2, 3, 2}, tape);
    worst_gap = std::max({worst_gap, chain_rule_gap(j, {"A"}, {"B"}, {"C"}), mi_kl_identity_check(j, {"A"}, {"B"}, {"C"})});
    auto pq = random_pair({"X"}, {4}, {}, tape);
    auto pr = pinsker_check(pq.first.marginal({"X"}), pq.second.marginal({"X"}));
    worst_slack = std::min(worst_slack, pr.bound - pr.tvd);
  }
  out.push_back(check("identities", worst_gap <= 1e-9, {{"max_gap", worst_gap}}));
  out.push_back(check("pinsker", worst_slack >= -1e-12, {{"min_slack", worst_slack}}));
  return out;
}

json suite_bounds() {
  json out = json::array();
  const double d = degradation_bound(10000, 1);
  out.push_back(check("degradation_bound", std::abs(d - (1e-4 + 0.15)) < 1e-12, {{"value", d}}));
  for (auto [r, n0] : std::vector<std::pair<int, int>>{{1, 64}, {2, 100}, {3, 100}}) {
    auto c = contradiction_chain(r, n0);
    out.push_back(check("contradiction_chain_r" + std::to_string(r) + "_n0_" + std::to_string(n0), c.all_hold(),
                        {{"premise_n0_gt_r4", c.premise_n0_gt_r4}, {"premise_32r_le_n0", c.premise_32r_le_n0}}));
  }
  return out;
}

json suite_collision(std::uint64_t seed, int jobs) {
  json out = json::array();
  const auto p = custom_params(1, {{1000, 8, 1, 1, 1}});
  auto cr = collision_rate(p, 1, 2000, seed, jobs);
  const double exact = exact_collision_probability(p, 1).get_d();
  out.push_back(check("collision_rate_tight", cr.frequency <= cr.bound + 3 * cr.sigma,
                      {{"frequency", cr.frequency}, {"bound", cr.bound}, {"exact", exact}, {"theta", cr.theta}}));
  return out;
}

struct VerifyArgs {
  std::string suite = "g0", out;
};

int run_verify(const VerifyArgs& a, const Common& c) {
  json checks = json::array();
  auto add = [&](const json& part) {
    for (const auto& x : part) checks.push_back(x);
  };
  const bool all = a.suite == "all";
  bool known = false;
  if (all || a.suite == "g0") add(suite_g0()), known = true;
  if (all || a.suite == "info") add(suite_info(c.seed)), known = true;
  if (all || a.suite == "bounds") add(suite_bounds()), known = true;
  if (all || a.suite == "collision") add(suite_collision(c.seed, c.jobs)), known = true;
  if (!known) throw std::invalid_argument("unknown suite " + a.suite);
  bool pass = true;
  for (const auto& x : checks) pass = pass && x.at("pass").get<bool>();
  json j{{"config", {{"subcommand", "verify"}, {"suite", a.suite}, {"seed", c.seed}}}, {"pass", pass}, {"checks", checks}};
  write_json(a.out, j);
  return pass ? kOk : kInvalid;
}

struct InfoArgs {
  std::string table, other, measure = "entropy", a, b, c;
};

int run_info(const InfoArgs& a) {
  const auto t = joint_table_from_json(read_json(a.table));
  const auto A = split_list(a.a), B = split_list(a.b), C = split_list(a.c);
  json j{{"config", {{"subcommand", "info"}, {"table", a.table}, {"measure", a.measure}, {"a", A}, {"b", B}, {"c", C}}}};
  auto whole = [&](const JointTable& x) { return A.empty() ? FiniteDistribution{x.entries()} : x.marginal(A); };
  if (a.measure == "entropy") {
    j["value"] = A.empty() ? entropy(FiniteDistribution{t.entries()}) : entropy(t, A);
  } else if (a.measure == "cond-entropy") {
    j["value"] = cond_entropy(t, A, B);
  } else if (a.measure == "mi") {
    j["value"] = C.empty() ? mutual_info(t, A, B) : cond_mutual_info(t, A, B, C);
  } else if (a.measure == "kl" || a.measure == "tvd" || a.measure == "pinsker") {
    if (a.other.empty()) throw std::invalid_argument(a.measure + " needs --other");
    const auto u = joint_table_from_json(read_json(a.other));
    const auto p = whole(t), q = whole(u);
    if (a.measure == "kl") {
      auto d = kl(p, q);
      j["value"] = d.infinite ? json("inf") : json(d.value);
      j["infinite"] = d.infinite;
    } else if (a.measure == "tvd") {
      j["value"] = tvd(p, q);
    } else {
      auto r = pinsker_check(p, q);
      j["tvd"] = r.tvd;
      j["bound"] = std::isinf(r.bound) ? json("inf") : json(r.bound);
      j["holds"] = r.holds;
    }
  } else {
    throw std::invalid_argument("unknown measure " + a.measure);
  }
  std::cout << j.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relim: round-elimination experiments for triangle detection"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "seed (default $RELIM_SEED or 0)");
  app.add_option("--jobs", common.jobs, "worker threads")->check(CLI::Range(1, 64));

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "sample hard instances");
  g->add_option("--level", gen.level)->required();
  g->add_option("--params", gen.params, "params JSON")->required()->check(CLI::ExistingFile);
  g->add_option("--count", gen.count)->check(CLI::PositiveNumber);
  g->add_option("--out", gen.out, "output directory");
  g->add_option("--distribution", gen.dist)->check(CLI::IsMember({"g", "gtilde"}));
  g->add_option("--seed", common.seed);

  SimArgs sim;
  auto* s = app.add_subcommand("simulate", "run a registered protocol on an instance");
  s->add_option("--instance", sim.instance)->required()->check(CLI::ExistingFile);
  s->add_option("--protocol", sim.protocol)->required()->check(CLI::IsMember(protocol_names()));
  s->add_option("--bandwidth", sim.bandwidth);
  s->add_option("--dump-transcript", sim.dump, "JSONL path");
  s->add_option("--out", sim.out);
  s->add_option("--seed", common.seed);

  EstArgs est;
  auto* e = app.add_subcommand("estimate-success", "Monte Carlo success with a Wilson interval");
  e->add_option("--protocol", est.protocol)->required()->check(CLI::IsMember(protocol_names()));
  e->add_option("--params", est.params)->required()->check(CLI::ExistingFile);
  e->add_option("--level", est.level);
  e->add_option("--bandwidth", est.bandwidth);
  e->add_option("--trials", est.trials)->check(CLI::PositiveNumber);
  e->add_option("--out", est.out);
  e->add_option("--seed", common.seed);
  e->add_option("--jobs", common.jobs)->check(CLI::Range(1, 64));

  ElimArgs el;
  auto* r = app.add_subcommand("round-elim", "build pi_{r-1} from pi_r and measure it");
  r->add_option("--protocol", el.protocol)->required()->check(CLI::IsMember(protocol_names()));
  r->add_option("--params", el.params)->required()->check(CLI::ExistingFile);
  r->add_option("--level", el.level);
  r->add_option("--bandwidth", el.bandwidth);
  r->add_option("--trials", el.trials)->check(CLI::PositiveNumber);
  r->add_option("--strategy", el.strategy)->check(CLI::IsMember({"enum", "reject"}));
  r->add_option("--fallback", el.fallback)->check(CLI::IsMember({"fail", "drop"}));
  r->add_option("--cap", el.cap, "rejection cap per conditional draw");
  r->add_option("--hybrids", el.hybrids, "transcript samples per hybrid");
  r->add_option("--out", el.out, "output directory");
  r->add_option("--seed", common.seed);

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "oracle suites with pass/fail JSON");
  v->add_option("--suite", ver.suite)->check(CLI::IsMember({"g0", "info", "bounds", "collision", "all"}));
  v->add_option("--out", ver.out);
  v->add_option("--seed", common.seed);

  InfoArgs inf;
  auto* i = app.add_subcommand("info", "information measures on a JointTable");
  i->add_option("--table", inf.table)->required()->check(CLI::ExistingFile);
  i->add_option("--other", inf.other)->check(CLI::ExistingFile);
  i->add_option("--measure", inf.measure)
      ->check(CLI::IsMember({"entropy", "cond-entropy", "mi", "kl", "tvd", "pinsker"}));
  i->add_option("--a", inf.a, "comma-separated coordinates");
  i->add_option("--b", inf.b);
  i->add_option("--c", inf.c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? kOk : kInvalid;
  }

  try {
    if (*g) return run_gen(gen, common);
    if (*s) return run_simulate(sim, common);
    if (*e) return run_estimate(est, common);
    if (*r) return run_round_elim(el, common);
    if (*v) return run_verify(ver, common);
    if (*i) return run_info(inf);
  } catch (const InfeasibleParams& err) {
    std::cerr << "infeasible parameters: " << err.what() << "\n";
    return kInfeasible;
  } catch (const ValidationError& err) {
    std::cerr << "invalid instance:\n";
    for (const auto& x : err.violations) std::cerr << "  " << violation_name(x.kind) << ": " << x.detail << "\n";
    return kInvalid;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
