#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rhtl/product.hpp"

namespace rhtl {

/// Horizon-N path p_{1|k} ... p_{N|k} on the product, anchored at p_k.
struct PredictedTrajectory {
  ProductState anchor = 0;
  std::vector<ProductState> states;

  std::size_t horizon() const { return states.size(); }
  ProductState first() const { return states.front(); }
  ProductState terminal() const { return states.back(); }
  /// 1-based access, matching the stage numbering of the horizon problem.
  ProductState at(std::size_t i) const { return states.at(i - 1); }
};

/// Observed reward per system state, frozen for the duration of one solve.
using RewardSnapshot = std::vector<double>;

/// v(p_N) < infinity, imposed on the initial solve.
struct InitFinite {};
/// v(p_N) < bound.
struct Decrease {
  double bound;
};
/// v(p_index) = 0, 1-based.
struct ZeroAtIndex {
  std::size_t index;
};
/// v(p_N) < infinity.
struct FiniteTerminal {};

using TerminalConstraint = std::variant<InitFinite, Decrease, ZeroAtIndex, FiniteTerminal>;

std::string to_string(const TerminalConstraint& c);

/// Whether state `p` at 1-based stage `stage` of an `n`-step horizon is
/// admissible under `c`.
bool admissible(const TerminalConstraint& c, const EnergyMap& e, ProductState p, std::size_t stage,
                std::size_t n);

/// A start of the horizon problem. `entry_reward` is added in front of the
/// predicted reward when comparing anchors.
struct Anchor {
  ProductState state;
  double entry_reward = 0.0;
};

enum class Solver {
  kDynamicProgramming,
  /// Exhaustive depth-first enumeration of all horizon paths.
  kExhaustive,
};

/// Sum of snapshot rewards over the projected trajectory, counting repeated
/// visits each time. Accumulated from the terminal state backwards so that
/// every solver evaluates a given path to the same floating-point value.
double predicted_reward(const ProductAutomaton& p, const PredictedTrajectory& traj,
                        const RewardSnapshot& r);

/// Reward-maximal trajectory over all anchors satisfying every constraint in
/// `constraints`. Ties go to the lexicographically smallest (anchor, p_1, ...,
/// p_N) sequence under the product's id order. Returns nullopt if infeasible.
std::optional<PredictedTrajectory> solve_horizon(const ProductAutomaton& p, const EnergyMap& e,
                                                 std::span<const Anchor> starts,
                                                 const RewardSnapshot& r, std::size_t n,
                                                 std::span<const TerminalConstraint> constraints,
                                                 Solver solver = Solver::kDynamicProgramming);

std::optional<PredictedTrajectory> solve_horizon(const ProductAutomaton& p, const EnergyMap& e,
                                                 std::span<const Anchor> starts,
                                                 const RewardSnapshot& r, std::size_t n,
                                                 const TerminalConstraint& constraint,
                                                 Solver solver = Solver::kDynamicProgramming);

/// Initial controller: optimizes over the finite-energy initial product
/// states with a finite-energy terminal constraint. nullopt means no initial
/// state has finite energy, i.e. no run from q0 satisfies the formula.
std::optional<PredictedTrajectory> rh_init(const ProductAutomaton& p, const EnergyMap& e,
                                           const RewardSnapshot& r0, std::size_t n,
                                           Solver solver = Solver::kDynamicProgramming);

enum class ControlCase { kCase1 = 1, kCase2 = 2, kCase3 = 3 };

struct CaseDecision {
  ControlCase tag;
  /// 1-based index of the first zero-energy state of the previous
  /// trajectory; 0 when there is none.
  std::size_t first_zero = 0;
};

/// Case selection for the receding step. Throws InputError unless
/// pk == prev.first().
CaseDecision classify_case(ProductState pk, const PredictedTrajectory& prev, const EnergyMap& e);

/// Constraint imposed by the receding step for a given case.
TerminalConstraint case_constraint(const CaseDecision& d, const PredictedTrajectory& prev,
                                   const EnergyMap& e);

/// Receding-horizon step. Throws InputError on violated preconditions and
/// InfeasibleError if no trajectory satisfies the case constraint, which
/// cannot happen when the preconditions hold.
PredictedTrajectory rh_step(const ProductAutomaton& p, const EnergyMap& e, ProductState pk,
                            const PredictedTrajectory& prev, const RewardSnapshot& rk,
                            std::size_t n, Solver solver = Solver::kDynamicProgramming);

/// Block controller used for comparison: solves once and executes the whole
/// trajectory before solving again. With no `pk` it solves from the initial
/// set exactly like rh_init. From a zero-energy state the terminal state must
/// have finite energy; otherwise the block must either end strictly below the
/// current energy, or visit a zero-energy state and end with finite energy.
PredictedTrajectory baseline_step(const ProductAutomaton& p, const EnergyMap& e,
                                  std::optional<ProductState> pk, const RewardSnapshot& rk,
                                  std::size_t n, Solver solver = Solver::kDynamicProgramming);

}  // namespace rhtl
