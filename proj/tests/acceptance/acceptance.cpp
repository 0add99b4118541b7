// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "rhtl/environment.hpp"
#include "rhtl/harness.hpp"
#include "support.hpp"

using namespace rhtl;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  bool passed = true;
  std::string detail;

  void fail(const std::string& why) {
    if (passed) detail = why;
    passed = false;
  }
};

std::string fmt(double x, int precision = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << x;
  return os.str();
}

// Returns an empty string when all energy properties hold.
std::string energy_violation(const ProductAutomaton& p, const EnergyMap& e) {
  for (std::size_t s = 0; s < p.num_states(); ++s) {
    const std::string at = " at " + p.label(s);
    if ((e.v[s] == 0.0) != static_cast<bool>(e.fstar[s])) return "zero energy differs from F*" + at;
    if (e.fstar[s] && !p.accepting[s]) return "F* not accepting" + at;
    if (p.accepting[s] && !e.fstar[s] && e.v[s] != kInfinity) return "accepting outside F* is finite" + at;
    bool down = false;
    for (const auto& edge : p.succ[s]) {
      if (e.v[s] > edge.weight + e.v[edge.to] + 1e-9) return "triangle inequality" + at;
      if (e.finite(edge.to) && !e.finite(s)) return "finite successor of infinite state" + at;
      down = down || e.v[edge.to] < e.v[s];
    }
    if (e.finite(s) && e.v[s] > 0.0 && !down) return "no decreasing successor" + at;
  }
  return {};
}

Outcome energy_properties() {
  Outcome o;
  std::mt19937_64 rng(101);
  const std::vector<std::string> ap = {"a", "b", "u"};
  int instances = 0;
  for (int i = 0; i < 60; ++i) {
    const auto ts = fixtures::random_dts(rng, 2 + rng() % 14, ap);
    for (const auto& text : fixtures::generator_formulas()) {
      const auto p = build_product(ts, translate(parse_ltl(text), ap));
      const auto why = energy_violation(p, compute_energy(p));
      if (!why.empty()) o.fail(text + ": " + why);
      ++instances;
    }
  }
  o.detail = (o.passed ? "" : o.detail + "; ") + std::to_string(instances) + " products";
  return o;
}

Outcome energy_oracles() {
  Outcome o;
  std::mt19937_64 rng(202);
  int n = 0;
  for (; n < 250; ++n) {
    const auto p = fixtures::random_graph(rng, 1 + rng() % 12, 0.05 + 0.05 * (rng() % 6));
    const auto fstar = largest_self_reachable(p);
    if (fstar != fixtures::brute_force_fstar(p)) {
      o.fail("F* differs from subset enumeration on instance " + std::to_string(n));
      continue;
    }
    const auto e = compute_energy(p);
    const auto v = fixtures::floyd_energy(p, fstar);
    for (std::size_t s = 0; s < p.num_states(); ++s) {
      const bool same = v[s] == kInfinity ? e.v[s] == kInfinity : std::abs(e.v[s] - v[s]) <= 1e-9;
      if (!same) o.fail("energy differs from Floyd-Warshall on instance " + std::to_string(n));
    }
  }
  o.detail = (o.passed ? "" : o.detail + "; ") + std::to_string(n) + " instances";
  return o;
}

Outcome translator() {
  Outcome o;
  std::vector<std::pair<std::string, std::vector<std::string>>> cases;
  for (const auto& f : fixtures::generator_formulas()) cases.push_back({f, {"a", "b", "u"}});
  const std::vector<std::string> cs_ap = {"base", "survey", "recharge", "unsafe"};
  for (const auto& f : fixtures::surveillance_conjuncts()) cases.push_back({f, cs_ap});
  cases.push_back({fixtures::surveillance_formula(), cs_ap});
  std::mt19937_64 rng(303);
  for (const auto& [text, ap] : cases) {
    const auto f = parse_ltl(text);
    const auto b = translate(f, ap);
    for (int i = 0; i < 1000; ++i) {
      const auto w = fixtures::random_lasso(rng, ap);
      if (accepts_lasso(b, w) != eval_on_lasso(f, w)) {
        o.fail("disagreement on '" + text + "'");
        break;
      }
    }
  }
  o.detail = (o.passed ? "" : o.detail + "; ") + std::to_string(cases.size()) + " formulas x 1000 lassos";
  return o;
}

Outcome product_size() {
  Outcome o;
  const auto ts = grid_dts(fixtures::case_study_grid());
  const auto b = translate(parse_ltl(fixtures::surveillance_formula()), ts.ap);
  const auto p = build_product(ts, b);
  const auto imported = buchi_from_json(slurp(std::string(RHTL_FIXTURE_DIR) + "/surveillance_buchi12.json"));
  const auto pi = build_product(ts, imported);
  if (p.num_states() != 100 * b.num_states()) o.fail("translated product is not 100 * m");
  if (pi.num_states() != 1200) o.fail("imported automaton product is not 1200");
  o.detail = (o.passed ? "" : o.detail + "; ") + "m=" + std::to_string(b.num_states()) +
             " |S_P|=" + std::to_string(p.num_states()) + " imported |S_P|=" +
             std::to_string(pi.num_states());
  return o;
}

Model case_study_model() {
  return Model::build(grid_dts(fixtures::case_study_grid()), parse_ltl(fixtures::surveillance_formula()));
}

MonitorConfig case_study_monitors() {
  MonitorConfig mc;
  mc.forbidden = {"unsafe"};
  mc.sequences = {{"base", "survey"}, {"survey", "recharge"}};
  return mc;
}

Outcome case_study(const Model& m) {
  Outcome o;
  const RunOptions options;
  CaseStudyRewards rp(m.system.num_states(), {.seed = 7});
  const auto r = run(m, rp, options);
  if (r.verdict != Verdict::kCompleted) {
    o.fail("run reported an unsatisfiable specification");
    return o;
  }
  const auto& t = r.trace;
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    if (!m.energy.finite(t.steps[k].state)) o.fail("infinite energy at step " + std::to_string(k));
    if (!m.product.has_edge(t.steps[k].state, t.steps[k].next)) o.fail("not a product edge at step " + std::to_string(k));
  }
  if (!m.energy.finite(t.final_state)) o.fail("infinite final energy");
  const auto report = check_monitors(t, m, case_study_monitors());
  for (const auto& res : report.results) {
    if (!res.passed) o.fail(res.name + ": " + res.detail);
  }
  const auto v = t.energies();
  const auto bound = t.distinct_energies + options.horizon;
  const auto zero = std::find(v.begin(), v.end(), 0.0);
  const auto first_zero = static_cast<std::size_t>(zero - v.begin());
  if (zero == v.end() || first_zero > bound) o.fail("first zero energy beyond D+N");
  o.detail = (o.passed ? "" : o.detail + "; ") + "seed 7, " + std::to_string(t.steps.size()) +
             " steps, first zero at " + std::to_string(first_zero) + ", D+N=" + std::to_string(bound) +
             ", reward " + fmt(t.cumulative_reward(), 2);
  return o;
}

Outcome comparison(const Model& m) {
  Outcome o;
  const RewardFactory f = [&m](std::uint64_t seed) -> std::unique_ptr<RewardProcess> {
    return std::make_unique<CaseStudyRewards>(m.system.num_states(), CaseStudyConfig{.seed = seed});
  };
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
  const auto report = compare(m, f, {}, seeds);
  for (const auto& s : report.seeds) {
    std::cout << "  seed " << s.seed << ": rh " << fmt(s.rh_reward, 2) << " baseline "
              << fmt(s.baseline_reward, 2) << (s.rh_stream == s.baseline_stream ? "" : " (streams differ)")
              << "\n";
    if (s.rh_stream != s.baseline_stream) o.fail("reward streams differ for seed " + std::to_string(s.seed));
  }
  if (report.mean_rh < report.mean_baseline) o.fail("mean receding reward below baseline");
  const char* relation = report.mean_rh >= report.mean_baseline ? " >= " : " < ";
  o.detail = (o.passed ? "" : o.detail + "; ") + "mean rh " + fmt(report.mean_rh, 2) + relation +
             "baseline " + fmt(report.mean_baseline, 2);
  return o;
}

TerminalConstraint random_constraint(std::mt19937_64& rng, std::size_t n) {
  switch (rng() % 4) {
    case 0: return InitFinite{};
    case 1: return Decrease{static_cast<double>(1 + rng() % 12)};
    case 2: return ZeroAtIndex{1 + rng() % n};
    default: return FiniteTerminal{};
  }
}

Outcome solver_agreement() {
  Outcome o;
  std::mt19937_64 rng(707);
  int feasible = 0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t states = 1 + rng() % 8;
    const auto p = fixtures::random_graph(rng, states, 0.35, 0.4, true);
    const auto e = compute_energy(p);
    const std::size_t n = 1 + rng() % 4;
    const auto r = fixtures::random_snapshot(rng, states);
    std::vector<Anchor> starts;
    for (std::size_t s = 0; s < states; ++s) {
      if (rng() % 3 == 0) starts.push_back({s, static_cast<double>(rng() % 3)});
    }
    if (starts.empty()) starts.push_back({0, 0.0});
    const auto c = random_constraint(rng, n);
    const auto dp = solve_horizon(p, e, starts, r, n, c, Solver::kDynamicProgramming);
    const auto dfs = solve_horizon(p, e, starts, r, n, c, Solver::kExhaustive);
    if (dp.has_value() != dfs.has_value()) {
      o.fail("feasibility differs on instance " + std::to_string(i));
      continue;
    }
    if (!dp) continue;
    ++feasible;
    if (predicted_reward(p, *dp, r) != predicted_reward(p, *dfs, r) || dp->anchor != dfs->anchor ||
        dp->states != dfs->states) {
      o.fail("optimum differs on instance " + std::to_string(i));
    }
  }
  o.detail = (o.passed ? "" : o.detail + "; ") + "100 instances, " + std::to_string(feasible) + " feasible";
  return o;
}

Outcome timing() {
  Outcome o;
  const auto start = Clock::now();
  const auto m = case_study_model();
  const double build = seconds_since(start);
  if (build >= 5.0) o.fail("product and energy took " + fmt(build) + " s");

  // Re-solve every step of a case study run from the recorded observations.
  CaseStudyRewards rp(m.system.num_states(), {.seed = 7});
  const auto r = run(m, rp, {});
  const auto& steps = r.trace.steps;
  const std::size_t n = 4;
  double worst = 0.0;
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto t0 = Clock::now();
    const auto plan = k == 0 ? rh_init(m.product, m.energy, steps[0].observed, n)
                             : std::optional(rh_step(m.product, m.energy, steps[k].state,
                                                     steps[k - 1].plan, steps[k].observed, n));
    worst = std::max(worst, seconds_since(t0));
    if (!plan || plan->states != steps[k].plan.states) o.fail("re-solve differs at step " + std::to_string(k));
  }
  if (worst >= 1.0) o.fail("slowest step took " + fmt(worst) + " s");
  o.detail = (o.passed ? "" : o.detail + "; ") + "product+energy " + fmt(build) + " s, max step " +
             fmt(worst * 1000.0, 2) + " ms";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double limit;  // seconds, 0 for none
    std::function<Outcome()> check;
  };
  std::optional<Model> model;
  const auto cs = [&]() -> const Model& {
    if (!model) model = case_study_model();
    return *model;
  };
  const std::vector<Criterion> criteria = {
      {1, "energy properties on random products", 60.0, energy_properties},
      {2, "F* and energy match brute-force oracles", 60.0, energy_oracles},
      {3, "translator agrees with lasso semantics", 120.0, translator},
      {4, "case study product size", 0.0, product_size},
      {5, "case study run is feasible, safe and recurrent", 0.0, [&] { return case_study(cs()); }},
      {6, "receding horizon collects at least the baseline reward", 0.0, [&] { return comparison(cs()); }},
      {7, "dynamic programming matches exhaustive search", 0.0, solver_agreement},
      {8, "timing", 0.0, timing},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double elapsed = seconds_since(start);
    if (c.limit > 0.0 && elapsed >= c.limit) o.fail("took " + fmt(elapsed) + " s, limit " + fmt(c.limit, 0));
    failures += o.passed ? 0 : 1;
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " ("
              << o.detail << ", " << fmt(elapsed, 2) << " s)" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
