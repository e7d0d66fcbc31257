#include "relim/params.hpp"

namespace relim {

namespace {

std::int64_t to_i64(const mpz_class& v, const char* what) {
  if (!v.fits_slong_p()) throw InfeasibleParams(std::string(what) + " does not fit a machine word");
  return v.get_si();
}

}  // namespace

mpz_class mpz_pow(const mpz_class& base, unsigned long e) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

std::int64_t ParamSchedule::n(int l) const { return to_i64(at(l).n, "n"); }
std::int64_t ParamSchedule::d(int l) const { return to_i64(at(l).d, "d"); }
std::int64_t ParamSchedule::alpha(int l) const { return to_i64(at(l).alpha, "alpha"); }
std::int64_t ParamSchedule::beta(int l) const { return to_i64(at(l).beta, "beta"); }
std::int64_t ParamSchedule::gamma(int l) const { return to_i64(at(l).gamma, "gamma"); }

void ParamSchedule::require_samplable(int level, std::int64_t cap) const {
  if (level < 0 || level > top()) throw InfeasibleParams("level outside schedule");
  for (int l = 0; l <= level; ++l) {
    if (at(l).n > cap) {
      throw InfeasibleParams("level " + std::to_string(l) + " has n = " + at(l).n.get_str() +
                             " vertices per layer, above the sampling cap " + std::to_string(cap));
    }
  }
  auto rep = feasibility_check(*this);
  for (const auto& lr : rep.levels) {
    if (lr.level <= level && !lr.room_ok) throw InfeasibleParams("no sampling room at level " + std::to_string(lr.level));
  }
}

ParamSchedule canonical_params(std::int64_t n0, int r) {
  if (n0 < 1) throw std::invalid_argument("n_0 must be positive");
  if (r < 0) throw std::invalid_argument("r must be non-negative");
  ParamSchedule p;
  p.canonical = true;
  LevelParams base;
  base.n = n0;
  p.levels.push_back(base);
  for (int l = 1; l <= r; ++l) {
    const mpz_class& prev = p.levels.back().n;
    LevelParams lp;
    lp.n = mpz_pow(prev, 34);
    lp.d = mpz_pow(prev, 13);
    lp.alpha = mpz_pow(prev, 11);
    lp.beta = mpz_pow(prev, 5);
    lp.gamma = mpz_pow(prev, 6);
    p.levels.push_back(lp);
  }
  return p;
}

ParamSchedule custom_params(std::int64_t n0, const std::vector<CustomLevel>& levels) {
  if (n0 < 1) throw std::invalid_argument("n_0 must be positive");
  ParamSchedule p;
  LevelParams base;
  base.n = n0;
  p.levels.push_back(base);
  for (const auto& c : levels) {
    if (c.n < 1 || c.d < 1 || c.alpha < 1 || c.beta < 1 || c.gamma < 1) {
      throw std::invalid_argument("schedule counts must be positive");
    }
    LevelParams lp;
    lp.n = c.n;
    lp.d = c.d;
    lp.alpha = c.alpha;
    lp.beta = c.beta;
    lp.gamma = c.gamma;
    p.levels.push_back(lp);
  }
  return p;
}

std::vector<std::string> FeasibilityReport::violations() const {
  std::vector<std::string> out;
  for (const auto& l : levels) out.insert(out.end(), l.violations.begin(), l.violations.end());
  return out;
}

FeasibilityReport feasibility_check(const ParamSchedule& p) {
  FeasibilityReport rep;
  for (int l = 1; l <= p.top(); ++l) {
    const auto& prev = p.at(l - 1);
    const auto& cur = p.at(l);
    LevelReport lr;
    lr.level = l;
    const mpz_class types = l + 1;
    const std::string tag = "level " + std::to_string(l) + ": ";

    lr.room_needed = prev.n * (2 * cur.d * types + 1);
    lr.room_ok = lr.room_needed < cur.n;
    if (!lr.room_ok) {
      lr.violations.push_back(tag + "n_{l-1}(2 d (l+1) + 1) = " + lr.room_needed.get_str() + " is not below n = " +
                              cur.n.get_str());
    }
    lr.star_fit_ok = cur.d >= prev.n;
    if (!lr.star_fit_ok) lr.violations.push_back(tag + "d below n_{l-1}");

    lr.vertex_budget = cur.alpha * prev.n + 2 * cur.beta * prev.n * prev.n * types + cur.gamma * types * prev.n;
    lr.layer_budget = 4 * prev.n * lr.vertex_budget;
    lr.layer_budget_ok = lr.layer_budget <= cur.n - prev.n;
    if (!lr.layer_budget_ok) {
      lr.violations.push_back(tag + "auxiliary layer budget " + lr.layer_budget.get_str() + " exceeds n - n_{l-1}");
    }
    lr.completion_ok = cur.d >= prev.n + lr.vertex_budget;
    if (!lr.completion_ok) {
      lr.violations.push_back(tag + "d = " + cur.d.get_str() + " cannot absorb n_{l-1} + " +
                              lr.vertex_budget.get_str() + " fixed slots");
    }
    rep.gr_ok = rep.gr_ok && lr.room_ok && lr.star_fit_ok;
    rep.gr_tilde_ok = rep.gr_tilde_ok && lr.layer_budget_ok && lr.completion_ok;
    rep.levels.push_back(std::move(lr));
  }
  return rep;
}

std::int64_t exact_vertex_aux_count(std::int64_t n_prev, int level, std::int64_t alpha, std::int64_t beta,
                                    std::int64_t gamma) {
  const std::int64_t types = level + 1;
  return alpha * n_prev + types * n_prev * beta * ((n_prev - 1) + n_prev) + gamma * types * n_prev;
}

}  // namespace relim
