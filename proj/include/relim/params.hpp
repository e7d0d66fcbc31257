#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace relim {

struct InfeasibleParams : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sizes are arbitrary precision so canonical schedules can be written down
// even when they can never be sampled.
struct LevelParams {
  mpz_class n;
  mpz_class d, alpha, beta, gamma;  // unused at level 0
};

struct ParamSchedule {
  std::vector<LevelParams> levels;  // levels[l] for l = 0..r
  bool canonical = false;

  int top() const { return static_cast<int>(levels.size()) - 1; }
  const LevelParams& at(int l) const { return levels.at(static_cast<std::size_t>(l)); }

  std::int64_t n(int l) const;
  std::int64_t d(int l) const;
  std::int64_t alpha(int l) const;
  std::int64_t beta(int l) const;
  std::int64_t gamma(int l) const;

  // Refuses schedules with a layer above `cap` vertices; used by samplers.
  void require_samplable(int level, std::int64_t cap = 100'000'000) const;
};

ParamSchedule canonical_params(std::int64_t n0, int r);

// Custom schedule from (n_0) and per-level (n, d, alpha, beta, gamma) tuples.
struct CustomLevel {
  std::int64_t n, d, alpha, beta, gamma;
};
ParamSchedule custom_params(std::int64_t n0, const std::vector<CustomLevel>& levels);

struct LevelReport {
  int level = 0;
  // n_{l-1} (2 d_l (l+1) + 1) < n_l
  mpz_class room_needed;
  bool room_ok = true;
  // d_l >= n_{l-1}: starred slots alone can never overshoot a type.
  bool star_fit_ok = true;
  // alpha n + 2 beta n^2 (l+1) + gamma (l+1) n, per inner vertex and layer
  mpz_class vertex_budget;
  // 4 n (vertex_budget) against n_l - n_{l-1}
  mpz_class layer_budget;
  bool layer_budget_ok = true;
  // d_l >= n_{l-1} + vertex_budget: every type-t count fixed before the
  // completion step stays <= d_l whatever the auxiliary draws were.
  bool completion_ok = true;
  std::vector<std::string> violations;
};

struct FeasibilityReport {
  bool gr_ok = true;        // sampling room for the recursive distribution
  bool gr_tilde_ok = true;  // additionally, auxiliary budget and completion room
  std::vector<LevelReport> levels;

  bool ok() const { return gr_ok && gr_tilde_ok; }
  std::vector<std::string> violations() const;
};

FeasibilityReport feasibility_check(const ParamSchedule& p);

// Per-vertex per-layer auxiliary count actually drawn in step (2) toward one
// other layer: alpha n + (r+1) n beta ((n-1) + n) + gamma (r+1) n.
std::int64_t exact_vertex_aux_count(std::int64_t n_prev, int level, std::int64_t alpha, std::int64_t beta,
                                    std::int64_t gamma);

mpz_class mpz_pow(const mpz_class& base, unsigned long e);

}  // namespace relim
