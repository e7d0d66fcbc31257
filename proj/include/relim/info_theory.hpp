#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "relim/rng.hpp"

namespace relim {

struct InvalidDistribution : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvalidCoordinate : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct PremiseViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Outcome = std::vector<std::int64_t>;

struct FiniteDistribution {
  std::map<Outcome, double> p;

  void validate(double tol = 1e-12) const;
  double at(const Outcome& o) const;
};

// Joint law over named coordinates; absent tuples have probability 0.
class JointTable {
 public:
  JointTable() = default;
  JointTable(std::vector<std::string> coords, std::map<Outcome, double> entries);

  const std::vector<std::string>& coords() const { return coords_; }
  const std::map<Outcome, double>& entries() const { return entries_; }
  std::size_t index(const std::string& c) const;
  std::vector<std::size_t> indices(const std::vector<std::string>& cs) const;

  FiniteDistribution marginal(const std::vector<std::string>& keep) const;
  JointTable marginal_table(const std::vector<std::string>& keep) const;
  void validate(double tol = 1e-12) const;

 private:
  std::vector<std::string> coords_;
  std::map<Outcome, double> entries_;
};

double entropy(const FiniteDistribution& d);
double entropy(const JointTable& j, const std::vector<std::string>& a);
double cond_entropy(const JointTable& j, const std::vector<std::string>& target, const std::vector<std::string>& given);
double mutual_info(const JointTable& j, const std::vector<std::string>& a, const std::vector<std::string>& b);
double cond_mutual_info(const JointTable& j, const std::vector<std::string>& a, const std::vector<std::string>& b,
                        const std::vector<std::string>& c);

// +infinity on a support violation, flagged rather than thrown.
struct Divergence {
  double value = 0;
  bool infinite = false;
};
Divergence kl(const FiniteDistribution& p, const FiniteDistribution& q);
double tvd(const FiniteDistribution& p, const FiniteDistribution& q);

struct PinskerResult {
  double tvd = 0, bound = 0;
  bool holds = false;
};
PinskerResult pinsker_check(const FiniteDistribution& p, const FiniteDistribution& q);

// |I(A;B|C) - E_{B,C} D(A|B,C || A|C)|
double mi_kl_identity_check(const JointTable& j, const std::vector<std::string>& a, const std::vector<std::string>& b,
                            const std::vector<std::string>& c);

// |I(A,B;C) - I(A;C) - I(B;C|A)|
double chain_rule_gap(const JointTable& j, const std::vector<std::string>& a, const std::vector<std::string>& b,
                      const std::vector<std::string>& c);

struct BoundCheck {
  double lhs = 0, rhs = 0;
  bool holds = false;
};
// mu and nu over the same ordered coordinates.
BoundCheck tvd_chain_bound_check(const JointTable& mu, const JointTable& nu);

struct OverconditioningResult {
  double tvd_x = 0;       // ||X - Y||
  double tvd_joint = 0;   // ||XZ - YZ||
  double expected = 0;    // E_Z ||(X|Z) - (Y|Z)||
  double equality_gap = 0;
  bool holds = false;
};
// Both tables carry the same coordinate names; z names the conditioning
// coordinates, and Z must have the same law in both.
OverconditioningResult overconditioning_check(const JointTable& xz, const JointTable& yz,
                                              const std::vector<std::string>& z);

enum class Independence { None, AperpDgivenC, AperpDgivenBC };

struct MonotonicityReport {
  double mi_abc = 0, h_b = 0;                  // I(A;B|C) <= H(B)
  double h_a_bc = 0, h_a_b = 0;                // H(A|B,C) <= H(A|B)
  double mi_abcd = 0;                          // I(A;B|C,D)
  bool mi_le_entropy = false, conditioning_lowers_entropy = false;
  bool extra_condition_raises_mi = true, extra_condition_lowers_mi = true;         // true when not applicable
  double min_slack = 0;
};
// Coordinates named A, B, C (and D when a premise is declared).
MonotonicityReport monotonicity_checks(const JointTable& j, Independence premise = Independence::None);

// Random tables. Entries are normalized exponentials with occasional zeros.
JointTable random_table(const std::vector<std::string>& coords, const std::vector<int>& cards, Tape& tape,
                        double zero_rate = 0.1);
// Built by explicit factorization so that the declared independence holds.
JointTable random_factored_table(Independence premise, const std::vector<int>& cards, Tape& tape);
// Random pair over the same coordinates; the second shares the first's
// marginal on `shared` when it is non-empty.
std::pair<JointTable, JointTable> random_pair(const std::vector<std::string>& coords, const std::vector<int>& cards,
                                              const std::vector<std::string>& shared, Tape& tape);

}  // namespace relim
