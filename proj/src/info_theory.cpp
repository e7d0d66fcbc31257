#include "relim/info_theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relim {

namespace {

constexpr double kTol = 1e-12;

Outcome project(const Outcome& o, const std::vector<std::size_t>& idx) {
  Outcome out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(o[i]);
  return out;
}

std::vector<std::string> join(std::initializer_list<const std::vector<std::string>*> parts) {
  std::vector<std::string> out;
  for (const auto* p : parts) {
    for (const auto& c : *p) {
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
  }
  return out;
}

double plogp_term(double p) { return p > 0 ? -p * std::log2(p) : 0.0; }

// Conditional slices: given-value -> (target-value -> prob), plus the given
// marginal.
struct Slices {
  std::map<Outcome, std::map<Outcome, double>> rows;
  std::map<Outcome, double> weight;
};

Slices slices(const JointTable& j, const std::vector<std::string>& target, const std::vector<std::string>& given) {
  const auto ti = j.indices(target), gi = j.indices(given);
  Slices s;
  for (const auto& [o, p] : j.entries()) {
    if (p <= 0) continue;
    auto g = project(o, gi);
    s.rows[g][project(o, ti)] += p;
    s.weight[g] += p;
  }
  return s;
}

double tvd_maps(const std::map<Outcome, double>& a, double na, const std::map<Outcome, double>& b, double nb) {
  double sum = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      sum += ia->second / na;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      sum += ib->second / nb;
      ++ib;
    } else {
      sum += std::abs(ia->second / na - ib->second / nb);
      ++ia;
      ++ib;
    }
  }
  return sum / 2;
}

}  // namespace

void FiniteDistribution::validate(double tol) const {
  double mass = 0;
  for (const auto& [o, q] : p) {
    if (!(q >= 0) || !std::isfinite(q)) throw InvalidDistribution("negative or non-finite probability");
    mass += q;
  }
  if (std::abs(mass - 1) > tol) throw InvalidDistribution("probabilities sum to " + std::to_string(mass));
}

double FiniteDistribution::at(const Outcome& o) const {
  auto it = p.find(o);
  return it == p.end() ? 0.0 : it->second;
}

JointTable::JointTable(std::vector<std::string> coords, std::map<Outcome, double> entries)
    : coords_(std::move(coords)), entries_(std::move(entries)) {
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    for (std::size_t k = i + 1; k < coords_.size(); ++k) {
      if (coords_[i] == coords_[k]) throw InvalidCoordinate("duplicate coordinate " + coords_[i]);
    }
  }
  for (const auto& [o, _] : entries_) {
    if (o.size() != coords_.size()) throw InvalidDistribution("entry arity differs from coordinate count");
  }
}

std::size_t JointTable::index(const std::string& c) const {
  auto it = std::find(coords_.begin(), coords_.end(), c);
  if (it == coords_.end()) throw InvalidCoordinate("no coordinate named " + c);
  return static_cast<std::size_t>(it - coords_.begin());
}

std::vector<std::size_t> JointTable::indices(const std::vector<std::string>& cs) const {
  std::vector<std::size_t> out;
  for (const auto& c : cs) out.push_back(index(c));
  return out;
}

FiniteDistribution JointTable::marginal(const std::vector<std::string>& keep) const {
  const auto idx = indices(keep);
  FiniteDistribution d;
  for (const auto& [o, p] : entries_) {
    if (p > 0) d.p[project(o, idx)] += p;
  }
  return d;
}

JointTable JointTable::marginal_table(const std::vector<std::string>& keep) const {
  return JointTable(keep, marginal(keep).p);
}

void JointTable::validate(double tol) const { FiniteDistribution{entries_}.validate(tol); }

double entropy(const FiniteDistribution& d) {
  d.validate(1e-9);
  double h = 0;
  for (const auto& [_, p] : d.p) h += plogp_term(p);
  return h;
}

double entropy(const JointTable& j, const std::vector<std::string>& a) { return entropy(j.marginal(a)); }

double cond_entropy(const JointTable& j, const std::vector<std::string>& target, const std::vector<std::string>& given) {
  j.indices(target);
  if (given.empty()) return entropy(j, target);
  return entropy(j, join({&target, &given})) - entropy(j, given);
}

double mutual_info(const JointTable& j, const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return entropy(j, a) - cond_entropy(j, a, b);
}

double cond_mutual_info(const JointTable& j, const std::vector<std::string>& a, const std::vector<std::string>& b,
                        const std::vector<std::string>& c) {
  return cond_entropy(j, a, c) - cond_entropy(j, a, join({&b, &c}));
}

Divergence kl(const FiniteDistribution& p, const FiniteDistribution& q) {
  p.validate(1e-9);
  q.validate(1e-9);
  Divergence d;
  for (const auto& [o, pv] : p.p) {
    if (pv <= 0) continue;
    const double qv = q.at(o);
    if (qv <= 0) {
      d.infinite = true;
      d.value = std::numeric_limits<double>::infinity();
      return d;
    }
    d.value += pv * std::log2(pv / qv);
  }
  return d;
}

double tvd(const FiniteDistribution& p, const FiniteDistribution& q) {
  p.validate(1e-9);
  q.validate(1e-9);
  return tvd_maps(p.p, 1.0, q.p, 1.0);
}

PinskerResult pinsker_check(const FiniteDistribution& p, const FiniteDistribution& q) {
  PinskerResult r;
  r.tvd = tvd(p, q);
  const auto d = kl(p, q);
  r.bound = d.infinite ? std::numeric_limits<double>::infinity() : std::sqrt(std::max(0.0, d.value) / 2);
  r.holds = r.tvd <= r.bound + kTol;
  return r;
}

double mi_kl_identity_check(const JointTable& j, const std::vector<std::string>& a, const std::vector<std::string>& b,
                            const std::vector<std::string>& c) {
  const double lhs = cond_mutual_info(j, a, b, c);
  const auto bc = join({&b, &c});
  const auto fine = slices(j, a, bc);
  const auto coarse = slices(j, a, c);
  const auto ci = j.indices(c);
  const auto bci = j.indices(bc);
  // position of each c-coordinate inside the (b, c) key
  std::vector<std::size_t> c_in_bc;
  for (auto i : ci) c_in_bc.push_back(static_cast<std::size_t>(std::find(bci.begin(), bci.end(), i) - bci.begin()));
  double rhs = 0;
  for (const auto& [key, row] : fine.rows) {
    const double w = fine.weight.at(key);
    const auto ckey = project(key, c_in_bc);
    const auto& crow = coarse.rows.at(ckey);
    const double cw = coarse.weight.at(ckey);
    double d = 0;
    for (const auto& [av, p] : row) {
      const double pa = p / w;
      const double qa = crow.at(av) / cw;
      d += pa * std::log2(pa / qa);
    }
    rhs += w * d;
  }
  return std::abs(lhs - rhs);
}

double chain_rule_gap(const JointTable& j, const std::vector<std::string>& a, const std::vector<std::string>& b,
                      const std::vector<std::string>& c) {
  const auto ab = join({&a, &b});
  return std::abs(mutual_info(j, ab, c) - mutual_info(j, a, c) - cond_mutual_info(j, b, c, a));
}

BoundCheck tvd_chain_bound_check(const JointTable& mu, const JointTable& nu) {
  if (mu.coords() != nu.coords()) throw InvalidCoordinate("tables have different coordinates");
  mu.validate(1e-9);
  nu.validate(1e-9);
  BoundCheck r;
  r.lhs = tvd(FiniteDistribution{mu.entries()}, FiniteDistribution{nu.entries()});
  const auto& cs = mu.coords();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::vector<std::string> prefix(cs.begin(), cs.begin() + static_cast<std::ptrdiff_t>(i));
    const std::vector<std::string> target{cs[i]};
    const auto sm = slices(mu, target, prefix);
    const auto sn = slices(nu, target, prefix);
    for (const auto& [key, row] : sm.rows) {
      const double w = sm.weight.at(key);
      auto it = sn.rows.find(key);
      // nu's conditional is arbitrary on a nu-null prefix; take distance 1
      const double d = it == sn.rows.end() ? 1.0 : tvd_maps(row, w, it->second, sn.weight.at(key));
      r.rhs += w * d;
    }
  }
  r.holds = r.lhs <= r.rhs + kTol;
  return r;
}

OverconditioningResult overconditioning_check(const JointTable& xz, const JointTable& yz,
                                              const std::vector<std::string>& z) {
  if (xz.coords() != yz.coords()) throw InvalidCoordinate("tables have different coordinates");
  std::vector<std::string> x;
  for (const auto& c : xz.coords()) {
    if (std::find(z.begin(), z.end(), c) == z.end()) x.push_back(c);
  }
  const auto zx = xz.marginal(z), zy = yz.marginal(z);
  if (tvd(zx, zy) > 1e-9) throw PremiseViolated("Z has different laws in the two tables");
  OverconditioningResult r;
  r.tvd_x = tvd(xz.marginal(x), yz.marginal(x));
  r.tvd_joint = tvd(FiniteDistribution{xz.entries()}, FiniteDistribution{yz.entries()});
  const auto sx = slices(xz, x, z), sy = slices(yz, x, z);
  for (const auto& [key, row] : sx.rows) {
    const double w = sx.weight.at(key);
    r.expected += w * tvd_maps(row, w, sy.rows.at(key), sy.weight.at(key));
  }
  r.equality_gap = std::abs(r.tvd_joint - r.expected);
  r.holds = r.tvd_x <= r.expected + kTol && r.equality_gap <= 1e-9;
  return r;
}

MonotonicityReport monotonicity_checks(const JointTable& j, Independence premise) {
  const std::vector<std::string> A{"A"}, B{"B"}, C{"C"}, D{"D"}, BC{"B", "C"}, CD{"C", "D"};
  MonotonicityReport r;
  r.mi_abc = cond_mutual_info(j, A, B, C);
  r.h_b = entropy(j, B);
  r.h_a_bc = cond_entropy(j, A, BC);
  r.h_a_b = cond_entropy(j, A, B);
  r.mi_le_entropy = r.mi_abc <= r.h_b + kTol;
  r.conditioning_lowers_entropy = r.h_a_bc <= r.h_a_b + kTol;
  r.min_slack = std::min(r.h_b - r.mi_abc, r.h_a_b - r.h_a_bc);
  if (premise != Independence::None) {
    const double dep = premise == Independence::AperpDgivenC ? cond_mutual_info(j, A, D, C)
                                                             : cond_mutual_info(j, A, D, BC);
    if (dep > 1e-9) throw PremiseViolated("declared independence fails: I = " + std::to_string(dep));
    r.mi_abcd = cond_mutual_info(j, A, B, CD);
    if (premise == Independence::AperpDgivenC) {
      r.extra_condition_raises_mi = r.mi_abc <= r.mi_abcd + kTol;
      r.min_slack = std::min(r.min_slack, r.mi_abcd - r.mi_abc);
    } else {
      r.extra_condition_lowers_mi = r.mi_abc + kTol >= r.mi_abcd;
      r.min_slack = std::min(r.min_slack, r.mi_abc - r.mi_abcd);
    }
  }
  return r;
}

namespace {

std::vector<Outcome> product_space(const std::vector<int>& cards) {
  std::vector<Outcome> out{Outcome{}};
  for (int c : cards) {
    if (c < 1) throw std::invalid_argument("cardinalities must be >= 1");
    std::vector<Outcome> next;
    for (const auto& o : out) {
      for (int v = 0; v < c; ++v) {
        auto w = o;
        w.push_back(v);
        next.push_back(std::move(w));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<double> random_weights(std::size_t k, Tape& tape, double zero_rate) {
  std::vector<double> w(k);
  double s = 0;
  for (auto& x : w) {
    x = tape.unit() < zero_rate ? 0.0 : -std::log(1.0 - tape.unit());
    s += x;
  }
  if (s <= 0) {
    w[tape.below(k)] = 1;
    s = 1;
  }
  for (auto& x : w) x /= s;
  return w;
}

// Conditional kernel: one random law over `card` values per key.
struct Kernel {
  std::map<Outcome, std::vector<double>> rows;
  int card;
  Tape* tape;
  double operator()(const Outcome& key, std::int64_t v) {
    auto it = rows.find(key);
    if (it == rows.end()) it = rows.emplace(key, random_weights(static_cast<std::size_t>(card), *tape, 0.1)).first;
    return it->second[static_cast<std::size_t>(v)];
  }
};

}  // namespace

JointTable random_table(const std::vector<std::string>& coords, const std::vector<int>& cards, Tape& tape,
                        double zero_rate) {
  if (coords.size() != cards.size()) throw std::invalid_argument("one cardinality per coordinate");
  const auto space = product_space(cards);
  const auto w = random_weights(space.size(), tape, zero_rate);
  std::map<Outcome, double> e;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (w[i] > 0) e[space[i]] = w[i];
  }
  return JointTable(coords, std::move(e));
}

JointTable random_factored_table(Independence premise, const std::vector<int>& cards, Tape& tape) {
  const std::vector<std::string> names{"A", "B", "C", "D"};
  if (cards.size() != 4) throw std::invalid_argument("factored tables have four coordinates A, B, C, D");
  if (premise == Independence::None) return random_table(names, cards, tape);
  Kernel pa{{}, cards[0], &tape}, pb{{}, cards[1], &tape}, pc{{}, cards[2], &tape}, pd{{}, cards[3], &tape};
  std::map<Outcome, double> e;
  for (const auto& o : product_space(cards)) {
    const auto a = o[0], b = o[1], c = o[2], d = o[3];
    double p;
    if (premise == Independence::AperpDgivenC) {
      // p(c) p(a|c) p(d|c) p(b|a,c,d)
      p = pc({}, c) * pa({c}, a) * pd({c}, d) * pb({a, c, d}, b);
    } else {
      // p(b) p(c|b) p(a|b,c) p(d|b,c)
      p = pb({}, b) * pc({b}, c) * pa({b, c}, a) * pd({b, c}, d);
    }
    if (p > 0) e[o] = p;
  }
  return JointTable(names, std::move(e));
}

std::pair<JointTable, JointTable> random_pair(const std::vector<std::string>& coords, const std::vector<int>& cards,
                                              const std::vector<std::string>& shared, Tape& tape) {
  auto mu = random_table(coords, cards, tape);
  auto nu = random_table(coords, cards, tape);
  if (shared.empty()) return {mu, nu};
  std::vector<std::string> rest;
  for (const auto& c : coords) {
    if (std::find(shared.begin(), shared.end(), c) == shared.end()) rest.push_back(c);
  }
  const auto zi = mu.indices(shared);
  const auto zmu = mu.marginal(shared);
  const auto znu = nu.marginal(shared);
  std::vector<int> rest_cards;
  for (const auto& c : rest) rest_cards.push_back(cards[mu.index(c)]);
  const auto rest_space = product_space(rest_cards);
  std::map<Outcome, double> e;
  for (const auto& o : product_space(cards)) {
    const auto z = project(o, zi);
    const double pz = zmu.at(z);
    if (pz <= 0) continue;
    const double qz = znu.at(z);
    double cond;
    if (qz > 0) {
      auto it = nu.entries().find(o);
      cond = it == nu.entries().end() ? 0.0 : it->second / qz;
    } else {
      cond = 1.0 / static_cast<double>(rest_space.size());
    }
    if (pz * cond > 0) e[o] = pz * cond;
  }
  return {mu, JointTable(coords, std::move(e))};
}

}  // namespace relim
