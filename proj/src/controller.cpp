#include "rhtl/controller.hpp"

#include <algorithm>
#include <sstream>

namespace rhtl {

namespace {

constexpr double kNoPath = -kInfinity;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double reward_at(const ProductAutomaton& p, const RewardSnapshot& r, ProductState s) {
  return r.at(p.system_state(s));
}

bool all_admissible(std::span<const TerminalConstraint> constraints, const EnergyMap& e,
                    ProductState s, std::size_t stage, std::size_t n) {
  return std::all_of(constraints.begin(), constraints.end(), [&](const TerminalConstraint& c) {
    return admissible(c, e, s, stage, n);
  });
}

std::vector<Anchor> sorted_by_rank(const ProductAutomaton& p, std::span<const Anchor> starts) {
  std::vector<Anchor> out(starts.begin(), starts.end());
  std::stable_sort(out.begin(), out.end(), [&](const Anchor& a, const Anchor& b) {
    return p.id_rank()[a.state] < p.id_rank()[b.state];
  });
  return out;
}

// Stage values W[i][s] (i = 1..n): best right-folded reward of a feasible
// suffix p_i = s, ..., p_n, or kNoPath.
std::optional<PredictedTrajectory> solve_dp(const ProductAutomaton& p, const EnergyMap& e,
                                            std::span<const Anchor> starts,
                                            const RewardSnapshot& r, std::size_t n,
                                            std::span<const TerminalConstraint> constraints) {
  const std::size_t m = p.num_states();
  std::vector<std::vector<double>> w(n + 2, std::vector<double>(m, kNoPath));
  for (ProductState s = 0; s < m; ++s) {
    if (all_admissible(constraints, e, s, n, n)) w[n][s] = reward_at(p, r, s);
  }
  for (std::size_t i = n - 1; i >= 1; --i) {
    for (ProductState s = 0; s < m; ++s) {
      if (!all_admissible(constraints, e, s, i, n)) continue;
      double best = kNoPath;
      for (const auto& edge : p.succ[s]) best = std::max(best, w[i + 1][edge.to]);
      if (best > kNoPath) w[i][s] = reward_at(p, r, s) + best;
    }
  }

  const auto anchors = sorted_by_rank(p, starts);
  const auto best_from = [&](const Anchor& a) {
    double best = kNoPath;
    for (const auto& edge : p.succ[a.state]) best = std::max(best, w[1][edge.to]);
    return best > kNoPath ? a.entry_reward + best : kNoPath;
  };
  double optimum = kNoPath;
  for (const auto& a : anchors) optimum = std::max(optimum, best_from(a));
  if (!(optimum > kNoPath)) return std::nullopt;

  // Lexicographic reconstruction: at every stage take the smallest-id state
  // through which the overall optimum is still attainable. Rounded addition
  // is monotone, so "attainable" only needs the stage value of the candidate.
  PredictedTrajectory traj;
  const Anchor* chosen = nullptr;
  for (const auto& a : anchors) {
    if (best_from(a) == optimum) {
      chosen = &a;
      break;
    }
  }
  traj.anchor = chosen->state;
  std::vector<double> prefix_rewards;
  const auto completed = [&](double stage_value) {
    double x = stage_value;
    for (auto it = prefix_rewards.rbegin(); it != prefix_rewards.rend(); ++it) x = *it + x;
    return chosen->entry_reward + x;
  };
  ProductState current = chosen->state;
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<ProductState> candidates;
    for (const auto& edge : p.succ[current]) candidates.push_back(edge.to);
    std::sort(candidates.begin(), candidates.end(),
              [&](ProductState a, ProductState b) { return p.id_rank()[a] < p.id_rank()[b]; });
    bool found = false;
    for (auto c : candidates) {
      if (w[i][c] > kNoPath && completed(w[i][c]) == optimum) {
        traj.states.push_back(c);
        prefix_rewards.push_back(reward_at(p, r, c));
        current = c;
        found = true;
        break;
      }
    }
    if (!found) throw InfeasibleError("dynamic-programming reconstruction lost the optimum");
  }
  return traj;
}

class ExhaustiveSearch {
 public:
  ExhaustiveSearch(const ProductAutomaton& p, const EnergyMap& e, const RewardSnapshot& r,
                   std::size_t n, std::span<const TerminalConstraint> constraints)
      : p_(p), e_(e), r_(r), n_(n), constraints_(constraints) {}

  std::optional<PredictedTrajectory> run(std::span<const Anchor> starts) {
    for (const auto& a : starts) {
      anchor_ = a;
      path_.clear();
      descend(a.state);
    }
    return best_;
  }

 private:
  void descend(ProductState from) {
    for (const auto& edge : p_.succ[from]) {
      const ProductState s = edge.to;
      if (!all_admissible(constraints_, e_, s, path_.size() + 1, n_)) continue;
      path_.push_back(s);
      if (path_.size() == n_) {
        offer();
      } else {
        descend(s);
      }
      path_.pop_back();
    }
  }

  void offer() {
    double x = reward_at(p_, r_, path_.back());
    for (std::size_t i = n_ - 1; i-- > 0;) x = reward_at(p_, r_, path_[i]) + x;
    const double value = anchor_.entry_reward + x;
    if (best_ && value < best_value_) return;
    if (best_ && value == best_value_ && !lex_smaller()) return;
    best_value_ = value;
    best_ = PredictedTrajectory{anchor_.state, path_};
  }

  bool lex_smaller() const {
    const auto& rank = p_.id_rank();
    std::vector<std::size_t> mine{rank[anchor_.state]}, theirs{rank[best_->anchor]};
    for (auto s : path_) mine.push_back(rank[s]);
    for (auto s : best_->states) theirs.push_back(rank[s]);
    return mine < theirs;
  }

  const ProductAutomaton& p_;
  const EnergyMap& e_;
  const RewardSnapshot& r_;
  std::size_t n_;
  std::span<const TerminalConstraint> constraints_;
  Anchor anchor_{};
  std::vector<ProductState> path_;
  std::optional<PredictedTrajectory> best_;
  double best_value_ = kNoPath;
};

}  // namespace

std::string to_string(const TerminalConstraint& c) {
  return std::visit(
      Overloaded{
          [](const InitFinite&) { return std::string("V(p_N) < inf [initial]"); },
          [](const Decrease& d) {
            std::ostringstream os;
            os.precision(17);
            os << "V(p_N) < " << d.bound;
            return os.str();
          },
          [](const ZeroAtIndex& z) { return "V(p_" + std::to_string(z.index) + ") = 0"; },
          [](const FiniteTerminal&) { return std::string("V(p_N) < inf"); },
      },
      c);
}

bool admissible(const TerminalConstraint& c, const EnergyMap& e, ProductState p, std::size_t stage,
                std::size_t n) {
  return std::visit(Overloaded{
                        [&](const InitFinite&) { return stage != n || e.v[p] < kInfinity; },
                        [&](const Decrease& d) { return stage != n || e.v[p] < d.bound; },
                        [&](const ZeroAtIndex& z) { return stage != z.index || e.v[p] == 0.0; },
                        [&](const FiniteTerminal&) { return stage != n || e.v[p] < kInfinity; },
                    },
                    c);
}

double predicted_reward(const ProductAutomaton& p, const PredictedTrajectory& traj,
                        const RewardSnapshot& r) {
  if (traj.states.empty()) return 0.0;
  double x = reward_at(p, r, traj.states.back());
  for (std::size_t i = traj.states.size() - 1; i-- > 0;) x = reward_at(p, r, traj.states[i]) + x;
  return x;
}

std::optional<PredictedTrajectory> solve_horizon(const ProductAutomaton& p, const EnergyMap& e,
                                                 std::span<const Anchor> starts,
                                                 const RewardSnapshot& r, std::size_t n,
                                                 std::span<const TerminalConstraint> constraints,
                                                 Solver solver) {
  if (n < 1) throw InputError("horizon must be at least 1");
  if (r.size() != p.system_ids.size()) throw InputError("reward snapshot size mismatch");
  for (const auto& c : constraints) {
    if (const auto* z = std::get_if<ZeroAtIndex>(&c); z && (z->index < 1 || z->index > n)) {
      throw InputError("zero-energy index outside the horizon");
    }
    if (const auto* d = std::get_if<Decrease>(&c); d && !(d->bound > 0.0 && d->bound < kInfinity)) {
      throw InputError("decrease bound must be finite and positive");
    }
  }
  if (solver == Solver::kExhaustive) {
    return ExhaustiveSearch(p, e, r, n, constraints).run(sorted_by_rank(p, starts));
  }
  return solve_dp(p, e, starts, r, n, constraints);
}

std::optional<PredictedTrajectory> solve_horizon(const ProductAutomaton& p, const EnergyMap& e,
                                                 std::span<const Anchor> starts,
                                                 const RewardSnapshot& r, std::size_t n,
                                                 const TerminalConstraint& constraint,
                                                 Solver solver) {
  return solve_horizon(p, e, starts, r, n, std::span<const TerminalConstraint>(&constraint, 1),
                       solver);
}

std::optional<PredictedTrajectory> rh_init(const ProductAutomaton& p, const EnergyMap& e,
                                           const RewardSnapshot& r0, std::size_t n, Solver solver) {
  std::vector<Anchor> anchors;
  for (auto s : p.initial) {
    if (e.finite(s)) anchors.push_back({s, 0.0});
  }
  if (anchors.empty()) return std::nullopt;
  auto traj = solve_horizon(p, e, anchors, r0, n, InitFinite{}, solver);
  if (!traj) throw InfeasibleError("initial horizon problem infeasible despite a finite-energy start");
  return traj;
}

CaseDecision classify_case(ProductState pk, const PredictedTrajectory& prev, const EnergyMap& e) {
  if (prev.states.empty() || prev.first() != pk) {
    throw InputError("current state is not the first state of the previous trajectory");
  }
  if (e.v[pk] == 0.0) return {ControlCase::kCase3, 1};
  for (std::size_t i = 1; i <= prev.horizon(); ++i) {
    if (e.v[prev.at(i)] == 0.0) return {ControlCase::kCase2, i};
  }
  return {ControlCase::kCase1, 0};
}

TerminalConstraint case_constraint(const CaseDecision& d, const PredictedTrajectory& prev,
                                   const EnergyMap& e) {
  switch (d.tag) {
    case ControlCase::kCase1:
      return Decrease{e.v[prev.terminal()]};
    case ControlCase::kCase2:
      return ZeroAtIndex{d.first_zero - 1};
    case ControlCase::kCase3:
      break;
  }
  return FiniteTerminal{};
}

PredictedTrajectory rh_step(const ProductAutomaton& p, const EnergyMap& e, ProductState pk,
                            const PredictedTrajectory& prev, const RewardSnapshot& rk,
                            std::size_t n, Solver solver) {
  if (!e.finite(pk)) throw InputError("receding step from an infinite-energy state");
  const CaseDecision d = classify_case(pk, prev, e);
  const TerminalConstraint c = case_constraint(d, prev, e);
  const Anchor anchor{pk, 0.0};
  auto traj = solve_horizon(p, e, std::span<const Anchor>(&anchor, 1), rk, n, c, solver);
  if (!traj) {
    throw InfeasibleError("receding step infeasible at " + p.label(pk) + " under " + to_string(c));
  }
  return *traj;
}

PredictedTrajectory baseline_step(const ProductAutomaton& p, const EnergyMap& e,
                                  std::optional<ProductState> pk, const RewardSnapshot& rk,
                                  std::size_t n, Solver solver) {
  if (!pk) {
    auto traj = rh_init(p, e, rk, n, solver);
    if (!traj) throw InputError("no initial product state has finite energy");
    return *traj;
  }
  const ProductState s = *pk;
  if (!e.finite(s)) throw InputError("baseline step from an infinite-energy state");
  const Anchor anchor{s, 0.0};
  const std::span<const Anchor> anchors(&anchor, 1);
  if (e.v[s] == 0.0) {
    auto traj = solve_horizon(p, e, anchors, rk, n, FiniteTerminal{}, solver);
    if (!traj) throw InfeasibleError("baseline step infeasible at " + p.label(s));
    return *traj;
  }

  // The feasible set is the union of {V(p_N) < V(s)} and, for each stage i,
  // {V(p_i) = 0 and V(p_N) < inf}. Solve each piece and keep the best, ties
  // to the lexicographically smaller sequence.
  std::vector<std::vector<TerminalConstraint>> pieces{{Decrease{e.v[s]}}};
  for (std::size_t i = 1; i <= n; ++i) pieces.push_back({ZeroAtIndex{i}, FiniteTerminal{}});

  std::optional<PredictedTrajectory> best;
  double best_value = kNoPath;
  for (const auto& piece : pieces) {
    auto traj = solve_horizon(p, e, anchors, rk, n, piece, solver);
    if (!traj) continue;
    const double value = predicted_reward(p, *traj, rk);
    const auto ranks = [&](const PredictedTrajectory& t) {
      std::vector<std::size_t> out;
      for (auto x : t.states) out.push_back(p.id_rank()[x]);
      return out;
    };
    if (!best || value > best_value || (value == best_value && ranks(*traj) < ranks(*best))) {
      best = std::move(traj);
      best_value = value;
    }
  }
  if (!best) throw InfeasibleError("baseline step infeasible at " + p.label(s));
  return *best;
}

}  // namespace rhtl
