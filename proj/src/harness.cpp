#include "rhtl/harness.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <set>
#include <sstream>

namespace rhtl {

Model Model::build(TransitionSystem ts, BuchiAutomaton b, ProductOptions options) {
  Model m;
  m.system = std::move(ts);
  m.automaton = std::move(b);
  m.product = build_product(m.system, m.automaton, options);
  m.energy = compute_energy(m.product);
  return m;
}

Model Model::build(TransitionSystem ts, const Formula& f, ProductOptions options) {
  auto b = translate(f, ts.ap);
  return build(std::move(ts), std::move(b), options);
}

bool Model::satisfiable() const {
  return std::any_of(product.initial.begin(), product.initial.end(),
                     [&](ProductState s) { return energy.finite(s); });
}

std::string to_string(StepKind kind) {
  switch (kind) {
    case StepKind::kInit: return "init";
    case StepKind::kCase1: return "1";
    case StepKind::kCase2: return "2";
    case StepKind::kCase3: return "3";
    case StepKind::kBlockSolve: return "solve";
    case StepKind::kBlockHold: return "hold";
  }
  return "?";
}

std::vector<ProductState> Trace::visited() const {
  std::vector<ProductState> out;
  for (const auto& s : steps) out.push_back(s.state);
  if (!steps.empty()) out.push_back(final_state);
  return out;
}

std::vector<double> Trace::energies() const {
  std::vector<double> out;
  for (const auto& s : steps) out.push_back(s.v);
  if (!steps.empty()) out.push_back(final_v);
  return out;
}

RunResult run(const Model& model, RewardProcess& rp, const RunOptions& options) {
  if (options.horizon < 1) throw InputError("horizon must be at least 1");
  if (options.steps < 1) throw InputError("step count must be at least 1");
  if (rp.time() != 0) throw InputError("reward process must start at tick 0");

  const auto& ts = model.system;
  const auto& p = model.product;
  const auto& e = model.energy;
  const std::size_t n = options.horizon;

  RunResult result;
  Trace& trace = result.trace;
  trace.horizon = n;
  trace.distinct_energies = e.distinct_finite_values();
  if (!model.satisfiable()) {
    result.verdict = Verdict::kUnsatisfiable;
    return result;
  }

  const bool receding = options.controller == ControllerKind::kRecedingHorizon;
  ProductState pk = 0;
  PredictedTrajectory plan;
  std::size_t plan_pos = 0;
  double cumulative = 0.0;
  for (int k = 0; k < options.steps; ++k) {
    const std::size_t qk = k == 0 ? ts.initial : p.system_state(pk);
    RewardSnapshot snapshot = observe(rp, options.neighborhood, ts, qk, k);

    StepKind kind;
    if (k == 0) {
      plan = receding ? *rh_init(p, e, snapshot, n, options.solver)
                      : baseline_step(p, e, std::nullopt, snapshot, n, options.solver);
      pk = plan.anchor;
      plan_pos = 0;
      kind = StepKind::kInit;
    } else if (receding) {
      const CaseDecision d = classify_case(pk, plan, e);
      kind = d.tag == ControlCase::kCase1   ? StepKind::kCase1
             : d.tag == ControlCase::kCase2 ? StepKind::kCase2
                                            : StepKind::kCase3;
      plan = rh_step(p, e, pk, plan, snapshot, n, options.solver);
      plan_pos = 0;
    } else if (plan_pos == plan.horizon()) {
      plan = baseline_step(p, e, pk, snapshot, n, options.solver);
      plan_pos = 0;
      kind = StepKind::kBlockSolve;
    } else {
      kind = StepKind::kBlockHold;
    }

    const ProductState next = plan.states[plan_pos++];
    const std::size_t q_next = p.system_state(next);
    TraceStep step;
    step.k = k;
    step.state = pk;
    step.q = p.system_state(pk);
    step.s = p.buchi_state(pk);
    step.v = e.v[pk];
    step.kind = kind;
    step.next = next;
    step.reward_collected = snapshot[q_next];
    cumulative += step.reward_collected;
    step.cumulative = cumulative;
    step.plan = plan;
    step.observed = std::move(snapshot);
    if (options.consume_rewards && step.reward_collected > 0.0) rp.consume(q_next);
    rp.advance(k + 1);
    step.full_reward_next = rp.full_reward(q_next, k + 1);
    trace.steps.push_back(std::move(step));
    pk = next;
  }
  trace.final_state = pk;
  trace.final_v = e.v[pk];
  trace.reward_stream_digest = rp.stream_digest();
  return result;
}

ComparisonReport compare(const Model& model, const RewardFactory& rewards, RunOptions options,
                         const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw InputError("comparison needs at least one seed");
  if (!model.satisfiable()) throw InputError("specification is unsatisfiable from the initial state");

  const auto one = [&](std::uint64_t seed) {
    SeedComparison out;
    out.seed = seed;
    auto series = [](const Trace& t, std::vector<double>& energy, std::vector<double>& cum) {
      energy = t.energies();
      for (const auto& s : t.steps) cum.push_back(s.cumulative);
    };
    RunOptions rh = options;
    rh.controller = ControllerKind::kRecedingHorizon;
    auto rp_rh = rewards(seed);
    const auto a = run(model, *rp_rh, rh);
    out.rh_reward = a.trace.cumulative_reward();
    out.rh_stream = a.trace.reward_stream_digest;
    series(a.trace, out.rh_energy, out.rh_cumulative);

    RunOptions bl = options;
    bl.controller = ControllerKind::kBaseline;
    auto rp_bl = rewards(seed);
    const auto b = run(model, *rp_bl, bl);
    out.baseline_reward = b.trace.cumulative_reward();
    out.baseline_stream = b.trace.reward_stream_digest;
    series(b.trace, out.baseline_energy, out.baseline_cumulative);
    return out;
  };

  std::vector<std::future<SeedComparison>> jobs;
  for (auto seed : seeds) jobs.push_back(std::async(std::launch::async, one, seed));
  ComparisonReport report;
  for (auto& j : jobs) report.seeds.push_back(j.get());
  for (const auto& s : report.seeds) {
    report.mean_rh += s.rh_reward;
    report.mean_baseline += s.baseline_reward;
  }
  report.mean_rh /= static_cast<double>(report.seeds.size());
  report.mean_baseline /= static_cast<double>(report.seeds.size());
  return report;
}

bool MonitorReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

MonitorResult safety_monitor(const std::vector<Observation>& obs,
                             const std::vector<std::string>& forbidden) {
  MonitorResult r{"safety", true, std::nullopt, ""};
  for (std::size_t i = 0; i < obs.size(); ++i) {
    for (const auto& f : forbidden) {
      if (obs[i].contains(f)) {
        r.passed = false;
        r.first_violation = i;
        r.detail = "'" + f + "' observed at position " + std::to_string(i);
        return r;
      }
    }
  }
  return r;
}

MonitorResult sequencing_monitor(const std::vector<Observation>& obs,
                                 const std::vector<std::pair<std::string, std::string>>& pairs) {
  MonitorResult r{"sequencing", true, std::nullopt, ""};
  std::optional<std::size_t> worst;
  for (const auto& [trigger, target] : pairs) {
    bool pending = false;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      const bool hit = obs[i].contains(target);
      if (pending && hit) pending = false;
      if (obs[i].contains(trigger)) {
        if (pending) {
          if (!worst || i < *worst) {
            worst = i;
            r.detail = "'" + trigger + "' repeated at position " + std::to_string(i) +
                       " before '" + target + "'";
          }
          break;
        }
        pending = true;
      }
    }
  }
  if (worst) {
    r.passed = false;
    r.first_violation = worst;
  }
  return r;
}

MonitorResult recurrence_monitor(const std::vector<double>& energies, std::size_t bound) {
  MonitorResult r{"recurrence", true, std::nullopt, ""};
  std::size_t last = 0;
  const auto fail = [&](std::size_t at) {
    r.passed = false;
    r.first_violation = at;
    r.detail = "no zero-energy state within " + std::to_string(bound) + " steps of position " +
               std::to_string(last);
  };
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (energies[i] != 0.0) continue;
    if (i - last > bound) {
      fail(last + bound + 1);
      return r;
    }
    last = i;
  }
  if (!energies.empty() && energies.size() - 1 - last > bound) fail(last + bound + 1);
  return r;
}

MonitorReport check_monitors(const Trace& trace, const Model& model, const MonitorConfig& config) {
  std::vector<Observation> obs;
  for (auto s : trace.visited()) obs.push_back(model.system.obs[model.product.system_state(s)]);
  MonitorReport report;
  report.results.push_back(safety_monitor(obs, config.forbidden));
  report.results.push_back(sequencing_monitor(obs, config.sequences));
  const std::size_t bound =
      config.recurrence_bound.value_or(trace.distinct_energies + trace.horizon);
  report.results.push_back(recurrence_monitor(trace.energies(), bound));
  return report;
}

namespace {

std::string number(double x) {
  if (!(x < kInfinity)) return "inf";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::string trace_to_csv(const Trace& trace, const Model& model) {
  std::ostringstream os;
  os << "k,q,s,case,v,reward_collected,cum_reward\n";
  for (const auto& s : trace.steps) {
    os << s.k << ',' << model.product.system_ids[s.q] << ',' << model.product.buchi_ids[s.s] << ','
       << to_string(s.kind) << ',' << number(s.v) << ',' << number(s.reward_collected) << ','
       << number(s.cumulative) << '\n';
  }
  return os.str();
}

std::string snapshot_to_dot(const Trace& trace, const Model& model, std::size_t step) {
  const auto& ts = model.system;
  if (!ts.has_coordinates()) throw InputError("snapshots need state coordinates");
  const TraceStep& st = trace.steps.at(step);
  std::set<std::size_t> planned;
  for (auto s : st.plan.states) planned.insert(model.product.system_state(s));
  const double top = std::max(1.0, *std::max_element(st.observed.begin(), st.observed.end()));

  std::ostringstream os;
  os << "graph snapshot_" << st.k << " {\n  layout=neato;\n  node [shape=circle, label=\"\", "
     << "style=filled, fillcolor=white];\n";
  for (std::size_t q = 0; q < ts.num_states(); ++q) {
    const double r = st.observed[q];
    double width = 0.12;
    std::string color = "white";
    if (r > 0.0) {
      width = 0.12 + 0.4 * r / top;
      color = "green";
    }
    if (planned.contains(q)) color = "brown";
    if (q == st.q) color = "red";
    os << "  \"" << ts.states[q] << "\" [pos=\"" << ts.coords[q]->x / 10.0 << ','
       << ts.coords[q]->y / 10.0 << "!\", width=" << width << ", fillcolor=" << color;
    if (!ts.obs[q].empty()) {
      os << ", xlabel=\"";
      bool first = true;
      for (const auto& o : ts.obs[q]) {
        os << (first ? "" : ",") << o;
        first = false;
      }
      os << '"';
    }
    os << "];\n";
  }
  std::size_t prev = st.q;
  for (auto s : st.plan.states) {
    const std::size_t q = model.product.system_state(s);
    os << "  \"" << ts.states[prev] << "\" -- \"" << ts.states[q] << "\" [color=brown, penwidth=2];\n";
    prev = q;
  }
  os << "}\n";
  return os.str();
}

}  // namespace rhtl
