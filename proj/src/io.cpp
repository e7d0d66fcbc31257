#include "relim/io.hpp"

#include <istream>
#include <sstream>

namespace relim {

namespace {

Layer layer_from_json(const json& j) {
  if (j.is_number_integer()) {
    const int v = j.get<int>();
    if (v < 0 || v > 2) throw std::invalid_argument("layer index must be 0, 1 or 2");
    return layer_at(v);
  }
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "A" || s == "a") return Layer::A;
    if (s == "B" || s == "b") return Layer::B;
    if (s == "C" || s == "c") return Layer::C;
  }
  throw std::invalid_argument("bad layer " + j.dump());
}

std::string layer_str(Layer l) { return std::string(1, "ABC"[layer_index(l)]); }

json id_lists(const std::array<std::vector<std::int64_t>, 3>& ids) {
  json j = json::object();
  for (int l = 0; l < 3; ++l) j[layer_str(layer_at(l))] = ids[l];
  return j;
}

json slot_set(const SlotSet& s) {
  json j = json::object();
  for (int l = 0; l < 3; ++l) {
    if (!s.by_layer[l].empty()) j[layer_str(layer_at(l))] = s.by_layer[l];
  }
  return j;
}

}  // namespace

std::string vertex_str(VertexId v) { return v.str(); }

VertexId parse_vertex(const std::string& s) {
  if (s.size() < 2) throw std::invalid_argument("bad vertex " + s);
  VertexId v{layer_from_json(json(s.substr(0, 1))), 0};
  std::size_t used = 0;
  v.index = std::stoll(s.substr(1), &used);
  if (used != s.size() - 1) throw std::invalid_argument("bad vertex " + s);
  return v;
}

json instance_to_json(const TypedTripartiteGraph& g) {
  json pairs = json::array();
  for (const auto& p : g.to_data().pairs) {
    pairs.push_back({layer_str(p.u.layer), p.u.index, layer_str(p.v.layer), p.v.index, p.type});
  }
  return json{{"n", g.n()}, {"r", g.r()}, {"pairs", pairs}};
}

InstanceData instance_data_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("r") || !j.contains("pairs")) {
    throw std::invalid_argument("instance JSON needs n, r and pairs");
  }
  InstanceData d;
  d.n = j.at("n").get<std::int64_t>();
  d.r = j.at("r").get<int>();
  for (const auto& e : j.at("pairs")) {
    if (!e.is_array() || e.size() != 5) throw std::invalid_argument("pair entries are [layer,index,layer,index,type]");
    d.pairs.push_back({{layer_from_json(e[0]), e[1].get<std::int64_t>()},
                       {layer_from_json(e[2]), e[3].get<std::int64_t>()},
                       e[4].get<int>()});
  }
  return d;
}

TypedTripartiteGraph instance_from_json(const json& j) { return TypedTripartiteGraph::from_data(instance_data_from_json(j)); }

json sidecar_json(const HardInstance& h, const Auxiliaries* aux, bool collision) {
  json j;
  j["level"] = h.level();
  j["collision_flag"] = collision;
  if (h.level() == 0) {
    j["starred"] = {{"A", h.starred[0]}, {"B", h.starred[1]}, {"C", h.starred[2]}};
  }
  if (h.embedding) {
    j["embedding"] = id_lists(h.embedding->ids);
    j["inner"] = instance_to_json(h.embedding->inner->graph);
  }
  if (aux) {
    json per = json::array();
    for (int l = 0; l < 3; ++l) {
      for (std::int64_t i = 1; i <= aux->n_prev; ++i) {
        const VertexId x{layer_at(l), i};
        const auto& va = aux->of(x);
        json v;
        v["vertex"] = x.str();
        v["J"] = json::array();
        for (const auto& s : va.J) v["J"].push_back(slot_set(s));
        v["K"] = json::array();
        for (const auto& s : va.K) v["K"].push_back(slot_set(s));
        v["L"] = va.L;
        per.push_back(std::move(v));
      }
    }
    j["aux"] = {{"alpha", aux->alpha}, {"beta", aux->beta}, {"gamma", aux->gamma}, {"per_vertex", per}};
  }
  return j;
}

std::string transcript_to_jsonl(const Transcript& t) {
  std::string out;
  for (const auto& [k, b] : t.entries) {
    json j{{"round", k.round}, {"from", k.from.str()}, {"to", k.to.str()}, {"bits", bits_to_hex(b)}, {"len", b.size()}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

Transcript transcript_from_jsonl(std::istream& in) {
  Transcript t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = json::parse(line);
    TranscriptKey k{j.at("round").get<int>(), parse_vertex(j.at("from").get<std::string>()),
                    parse_vertex(j.at("to").get<std::string>())};
    t.entries[k] = bits_from_hex(j.at("bits").get<std::string>(), j.at("len").get<std::size_t>());
  }
  return t;
}

JointTable joint_table_from_json(const json& j) {
  if (!j.contains("coords") || !j.contains("entries")) throw InvalidDistribution("JointTable JSON needs coords and entries");
  auto coords = j.at("coords").get<std::vector<std::string>>();
  std::vector<std::map<std::string, std::int64_t>> codes(coords.size());
  std::map<Outcome, double> e;
  for (const auto& row : j.at("entries")) {
    if (!row.is_array() || row.size() != coords.size() + 1) {
      throw InvalidDistribution("each entry is [outcome..., prob] with one value per coordinate");
    }
    Outcome o;
    for (std::size_t c = 0; c < coords.size(); ++c) {
      const auto& v = row[c];
      if (v.is_number_integer()) {
        o.push_back(v.get<std::int64_t>());
      } else {
        const auto s = v.is_string() ? v.get<std::string>() : v.dump();
        auto [it, _] = codes[c].emplace(s, static_cast<std::int64_t>(codes[c].size()));
        o.push_back(it->second);
      }
    }
    e[o] += row.back().get<double>();
  }
  JointTable t(std::move(coords), std::move(e));
  t.validate(1e-9);
  return t;
}

json joint_table_to_json(const JointTable& t) {
  json entries = json::array();
  for (const auto& [o, p] : t.entries()) {
    json row = json::array();
    for (auto v : o) row.push_back(v);
    row.push_back(p);
    entries.push_back(std::move(row));
  }
  return json{{"coords", t.coords()}, {"entries", entries}};
}

ParamSchedule params_from_json(const json& j) {
  if (j.contains("canonical")) {
    const auto& c = j.at("canonical");
    return canonical_params(c.at("n0").get<std::int64_t>(), c.at("r").get<int>());
  }
  if (!j.contains("n0") || !j.contains("levels")) throw std::invalid_argument("params JSON needs n0 and levels");
  std::vector<CustomLevel> lv;
  for (const auto& l : j.at("levels")) {
    lv.push_back({l.at("n").get<std::int64_t>(), l.at("d").get<std::int64_t>(), l.value("alpha", std::int64_t{1}),
                  l.value("beta", std::int64_t{1}), l.value("gamma", std::int64_t{1})});
  }
  return custom_params(j.at("n0").get<std::int64_t>(), lv);
}

json params_to_json(const ParamSchedule& p) {
  json levels = json::array();
  for (int l = 1; l <= p.top(); ++l) {
    const auto& lp = p.at(l);
    levels.push_back({{"n", lp.n.get_str()},
                      {"d", lp.d.get_str()},
                      {"alpha", lp.alpha.get_str()},
                      {"beta", lp.beta.get_str()},
                      {"gamma", lp.gamma.get_str()}});
  }
  // sizes as decimal strings: canonical schedules overflow any integer type
  return json{{"n0", p.at(0).n.get_str()}, {"canonical", p.canonical}, {"levels", levels}};
}

json feasibility_to_json(const FeasibilityReport& r) {
  json levels = json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"level", l.level},
                      {"room_ok", l.room_ok},
                      {"star_fit_ok", l.star_fit_ok},
                      {"layer_budget_ok", l.layer_budget_ok},
                      {"completion_ok", l.completion_ok},
                      {"violations", l.violations}});
  }
  return json{{"gr_ok", r.gr_ok}, {"gr_tilde_ok", r.gr_tilde_ok}, {"levels", levels}};
}

json report_to_json(const EliminationReport& r) {
  return json{{"rounds_used", r.rounds_used},
              {"bandwidth_used", r.bandwidth_used},
              {"bandwidth_limit", r.bandwidth_limit},
              {"trials", r.trials},
              {"successes", r.successes},
              {"success_frequency", r.success_frequency},
              {"inconsistency_count", r.inconsistency_count},
              {"fallback_count", r.fallback_count},
              {"fallback_trials", r.fallback_trials},
              {"rejections", r.rejections},
              {"draws", r.draws},
              {"consistency_checked", r.consistency_checked},
              {"consistency_failures", r.consistency_failures},
              {"predicted_degradation", r.predicted_degradation}};
}

}  // namespace relim
