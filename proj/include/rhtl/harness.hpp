#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rhtl/buchi.hpp"
#include "rhtl/controller.hpp"
#include "rhtl/environment.hpp"
#include "rhtl/product.hpp"
#include "rhtl/system.hpp"

namespace rhtl {

/// Offline part of the control loop: automaton, product and energy.
struct Model {
  TransitionSystem system;
  BuchiAutomaton automaton;
  ProductAutomaton product;
  EnergyMap energy;

  static Model build(TransitionSystem ts, BuchiAutomaton b, ProductOptions options = {});
  /// Translates `f` over the system's propositions first.
  static Model build(TransitionSystem ts, const Formula& f, ProductOptions options = {});

  /// Some initial product state has finite energy.
  bool satisfiable() const;
};

enum class StepKind { kInit, kCase1, kCase2, kCase3, kBlockSolve, kBlockHold };

std::string to_string(StepKind kind);

struct TraceStep {
  int k = 0;
  ProductState state = 0;  // p_k
  std::size_t q = 0;
  std::size_t s = 0;
  double v = 0.0;
  StepKind kind = StepKind::kInit;
  ProductState next = 0;          // p_{k+1}
  double reward_collected = 0.0;  // R_k(q_{k+1})
  double full_reward_next = 0.0;  // R(q_{k+1}, k+1), after consumption
  double cumulative = 0.0;
  PredictedTrajectory plan;  // trajectory in force at step k
  RewardSnapshot observed;   // R_k
};

struct Trace {
  std::vector<TraceStep> steps;
  ProductState final_state = 0;
  double final_v = 0.0;
  std::size_t horizon = 0;
  std::size_t distinct_energies = 0;  // D
  std::uint64_t reward_stream_digest = 0;

  double cumulative_reward() const { return steps.empty() ? 0.0 : steps.back().cumulative; }
  /// Product states p_0 ... p_T.
  std::vector<ProductState> visited() const;
  /// Energies v(p_0) ... v(p_T).
  std::vector<double> energies() const;
};

enum class ControllerKind { kRecedingHorizon, kBaseline };

struct RunOptions {
  std::size_t horizon = 4;
  int steps = 100;
  Neighborhood neighborhood = Neighborhood::metric(25.0);
  ControllerKind controller = ControllerKind::kRecedingHorizon;
  Solver solver = Solver::kDynamicProgramming;
  /// A collected reward is removed from the process on visit.
  bool consume_rewards = true;
};

enum class Verdict { kCompleted, kUnsatisfiable };

struct RunResult {
  Verdict verdict = Verdict::kCompleted;
  Trace trace;
};

/// Runs the closed loop for `options.steps` transitions. `rp` must be at
/// tick 0 and is advanced in place.
RunResult run(const Model& model, RewardProcess& rp, const RunOptions& options);

using RewardFactory = std::function<std::unique_ptr<RewardProcess>(std::uint64_t seed)>;

struct SeedComparison {
  std::uint64_t seed = 0;
  double rh_reward = 0.0;
  double baseline_reward = 0.0;
  std::uint64_t rh_stream = 0;
  std::uint64_t baseline_stream = 0;
  std::vector<double> rh_energy;
  std::vector<double> baseline_energy;
  std::vector<double> rh_cumulative;
  std::vector<double> baseline_cumulative;
};

struct ComparisonReport {
  std::vector<SeedComparison> seeds;
  double mean_rh = 0.0;
  double mean_baseline = 0.0;
};

/// Runs the receding-horizon and block controllers on identical reward
/// streams for each seed. Seeds run concurrently. Throws InputError if the
/// specification is unsatisfiable.
ComparisonReport compare(const Model& model, const RewardFactory& rewards, RunOptions options,
                         const std::vector<std::uint64_t>& seeds);

struct MonitorConfig {
  /// Propositions that must never be observed.
  std::vector<std::string> forbidden;
  /// (trigger, target): between two trigger visits a target must occur,
  /// counting the later trigger position.
  std::vector<std::pair<std::string, std::string>> sequences;
  /// Maximal distance between zero-energy visits; defaults to D + N.
  std::optional<std::size_t> recurrence_bound;
};

struct MonitorResult {
  std::string name;
  bool passed = true;
  std::optional<std::size_t> first_violation;
  std::string detail;
};

struct MonitorReport {
  std::vector<MonitorResult> results;
  bool all_passed() const;
};

MonitorReport check_monitors(const Trace& trace, const Model& model, const MonitorConfig& config);

/// Lower-level monitors over explicit sequences (positions 0..T).
MonitorResult safety_monitor(const std::vector<Observation>& obs,
                             const std::vector<std::string>& forbidden);
MonitorResult sequencing_monitor(const std::vector<Observation>& obs,
                                 const std::vector<std::pair<std::string, std::string>>& pairs);
MonitorResult recurrence_monitor(const std::vector<double>& energies, std::size_t bound);

/// Trace CSV: `k,q,s,case,v,reward_collected,cum_reward`.
std::string trace_to_csv(const Trace& trace, const Model& model);

/// Graphviz snapshot of step `k` on a system with coordinates: current state
/// red, observed rewards green and sized by value, predicted trajectory brown.
std::string snapshot_to_dot(const Trace& trace, const Model& model, std::size_t step);

}  // namespace rhtl
