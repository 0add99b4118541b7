#include <gtest/gtest.h>

#include <random>

#include "rhtl/errors.hpp"
#include "rhtl/product.hpp"
#include "support.hpp"

using namespace rhtl;

namespace {

// A -> B (1), B -> C (2), C -> B (1), C -> C (3), F = {C}.
ProductAutomaton abc() {
  return product_from_graph({"A", "B", "C"}, {{0, 1, 1}, {1, 2, 2}, {2, 1, 1}, {2, 2, 3}}, {0, 0, 1},
                            {0});
}

void expect_energy_properties(const ProductAutomaton& p, const EnergyMap& e) {
  for (std::size_t s = 0; s < p.num_states(); ++s) {
    EXPECT_EQ(e.v[s] == 0.0, static_cast<bool>(e.fstar[s]));
    if (p.accepting[s] && !e.fstar[s]) {
      EXPECT_EQ(e.v[s], kInfinity);
    }
    if (e.fstar[s]) {
      EXPECT_TRUE(p.accepting[s]);
    }
    for (const auto& edge : p.succ[s]) {
      EXPECT_LE(e.v[s], edge.weight + e.v[edge.to] + 1e-9);
      if (e.finite(edge.to)) {
        EXPECT_TRUE(e.finite(s));
      }
    }
    if (e.v[s] > 0.0 && e.finite(s)) {
      bool down = false;
      for (const auto& edge : p.succ[s]) down = down || e.v[edge.to] < e.v[s];
      EXPECT_TRUE(down) << p.label(s);
    }
  }
}

}  // namespace

TEST(Energy, HandExample) {
  const auto p = abc();
  const auto e = compute_energy(p);
  EXPECT_EQ(e.fstar, (std::vector<char>{0, 0, 1}));
  EXPECT_EQ(e.v, (std::vector<double>{3, 2, 0}));
  EXPECT_EQ(e.distinct_finite_values(), 3u);
}

TEST(Energy, UnreachableIsInfinite) {
  const auto p = product_from_graph({"C", "D"}, {{0, 0, 1}, {1, 1, 1}}, {1, 0}, {0});
  const auto e = compute_energy(p);
  EXPECT_EQ(e.v[0], 0.0);
  EXPECT_EQ(e.v[1], kInfinity);
}

TEST(SelfReachable, SelfLoop) {
  const auto p = product_from_graph({"C"}, {{0, 0, 1}}, {1}, {0});
  EXPECT_EQ(largest_self_reachable(p), std::vector<char>{1});
}

TEST(SelfReachable, ChainEmpties) {
  const auto p =
      product_from_graph({"X", "Y", "sink"}, {{0, 1, 1}, {1, 2, 1}, {2, 2, 1}}, {1, 1, 0}, {0});
  EXPECT_EQ(largest_self_reachable(p), (std::vector<char>{0, 0, 0}));
  const auto e = compute_energy(p);
  EXPECT_EQ(e.v[0], kInfinity);
  EXPECT_EQ(e.v[1], kInfinity);
}

TEST(SelfReachable, MatchesSubsetEnumeration) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 300; ++i) {
    const auto p = fixtures::random_graph(rng, 1 + rng() % 12, 0.05 + 0.05 * (rng() % 6));
    const auto fstar = largest_self_reachable(p);
    ASSERT_EQ(fstar, fixtures::brute_force_fstar(p)) << "instance " << i;
    const auto e = compute_energy(p);
    const auto v = fixtures::floyd_energy(p, fstar);
    for (std::size_t s = 0; s < p.num_states(); ++s) {
      if (v[s] == kInfinity) {
        ASSERT_EQ(e.v[s], kInfinity);
      } else {
        ASSERT_NEAR(e.v[s], v[s], 1e-9);
      }
    }
    expect_energy_properties(p, e);
  }
}

TEST(Product, FullSizeAndEdges) {
  std::mt19937_64 rng(4);
  const std::vector<std::string> ap = {"a", "b", "u"};
  for (int i = 0; i < 40; ++i) {
    const auto ts = fixtures::random_dts(rng, 3, ap);
    const auto& text = fixtures::generator_formulas()[i % 5];
    const auto b = translate(parse_ltl(text), ap);
    const auto p = build_product(ts, b);
    ASSERT_EQ(p.num_states(), ts.num_states() * b.num_states());
    for (std::size_t x = 0; x < p.num_states(); ++x) {
      for (std::size_t y = 0; y < p.num_states(); ++y) {
        const auto [q, s] = p.pair_of[x];
        const auto [q2, s2] = p.pair_of[y];
        ASSERT_EQ(p.has_edge(x, y), fixtures::brute_force_edge(ts, b, q, s, q2, s2));
      }
    }
    for (std::size_t x = 0; x < p.num_states(); ++x) {
      for (const auto& e : p.succ[x]) {
        const auto q = p.system_state(x);
        bool found = false;
        for (const auto& te : ts.edges[q]) {
          if (te.to == p.system_state(e.to)) {
            EXPECT_EQ(te.weight, e.weight);
            found = true;
          }
        }
        EXPECT_TRUE(found);
      }
      EXPECT_EQ(static_cast<bool>(p.accepting[x]), b.is_accepting(p.buchi_state(x)));
    }
  }
}

TEST(Product, SingleSelfLoop) {
  TransitionSystem ts;
  ts.states = {"q"};
  ts.ap = {"a"};
  ts.obs = {{"a"}};
  ts.edges = {{{0, 1.0}}};
  const auto b = translate(parse_ltl("G a"));
  const auto p = build_product(ts, b);
  EXPECT_GT(p.num_transitions(), 0u);
  ts.obs = {{}};
  EXPECT_EQ(build_product(ts, b).num_transitions(), 0u);
}

TEST(Product, CaseStudySize) {
  const auto ts = grid_dts(fixtures::case_study_grid());
  const auto b = translate(parse_ltl(fixtures::surveillance_formula()), ts.ap);
  const auto p = build_product(ts, b);
  EXPECT_EQ(p.num_states(), 100 * b.num_states());
  const auto e = compute_energy(p);
  expect_energy_properties(p, e);
  ASSERT_EQ(p.initial.size(), 1u);
  EXPECT_TRUE(e.finite(p.initial[0]));
}

TEST(Product, ReachableOnly) {
  const auto ts = grid_dts(fixtures::case_study_grid());
  const auto b = translate(parse_ltl(fixtures::surveillance_formula()), ts.ap);
  const auto full = build_product(ts, b);
  const auto reach = build_product(ts, b, {.reachable_only = true});
  EXPECT_LT(reach.num_states(), full.num_states());
  for (auto s : reach.initial) EXPECT_EQ(reach.system_state(s), ts.initial);
}

TEST(Product, AlphabetMismatch) {
  const auto ts = grid_dts(fixtures::case_study_grid());
  const auto b = translate(parse_ltl("G F zzz"));
  EXPECT_THROW(build_product(ts, b), InputError);
}

TEST(Project, DropsAutomatonComponent) {
  const auto p = abc();
  EXPECT_EQ(project(p, {0, 2, 1}), (std::vector<std::size_t>{0, 2, 1}));
  EXPECT_TRUE(project(p, {}).empty());
}

TEST(Energy, EnergyCsvAndDot) {
  const auto p = product_from_graph({"A", "D"}, {{0, 0, 1}, {1, 1, 1}}, {1, 0}, {0});
  const auto e = compute_energy(p);
  EXPECT_EQ(energy_to_csv(p, e), "state_q,state_s,v\nA,s,0\nD,s,inf\n");
  const auto dot = product_to_dot(p, &e);
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("inf"), std::string::npos);
}
