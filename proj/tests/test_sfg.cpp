#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace triad;
using namespace triad::sfg;

namespace {

double err(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(FlowGraph, SeriesChainMultiplies) {
  FlowGraph g;
  g.add_node("x", NodeRole::Source);
  g.add_node("y");
  g.add_node("z", NodeRole::Sink);
  g.add_edge(0, 1, cplx(2.0, 1.0));
  g.add_edge(1, 2, cplx(0.5, -3.0));
  const auto r = mason_gain(g, "x", "z", 0.0);
  EXPECT_LT(err(r.value, cplx(2.0, 1.0) * cplx(0.5, -3.0)), 1e-15);
  EXPECT_EQ(r.n_paths, 1u);
  EXPECT_EQ(r.n_loops, 0u);
  EXPECT_EQ(r.determinant, cplx(1.0));
}

TEST(FlowGraph, NegativeFeedbackLoop) {
  // G / (1 - G H) with a frequency-dependent forward gain
  FlowGraph g;
  g.add_node("in", NodeRole::Source);
  g.add_node("u");
  g.add_node("v");
  g.add_node("out", NodeRole::Sink);
  const double tau = 1e-3;
  auto G = [tau](double w) { return 5.0 / cplx(1.0, w * tau); };
  const cplx H(-0.3, 0.1);
  g.add_edge("in", "u", [](double) { return cplx(1.0); });
  g.add_edge("u", "v", G);
  g.add_edge(2, 1, H);
  g.add_edge("v", "out", [](double) { return cplx(1.0); });
  for (double w : {0.0, 100.0, 1e3, 1e5}) {
    const cplx expect = G(w) / (1.0 - G(w) * H);
    EXPECT_LT(err(mason_gain(g, "in", "out", w).value, expect), 1e-14);
    EXPECT_LT(err(solve_gain(g, "in", "out", w), expect), 1e-14);
  }
}

TEST(FlowGraph, NonTouchingSelfLoopsFactorize) {
  FlowGraph g;
  g.add_node("s", NodeRole::Source);
  g.add_node("n1");
  g.add_node("n2");
  g.add_node("t", NodeRole::Sink);
  const cplx a(1.1, 0.2), b(-0.4, 0.9), c(0.7, 0.0), l1(0.3, 0.4), l2(-0.5, 0.2);
  g.add_edge(0, 1, a);
  g.add_edge(1, 2, b);
  g.add_edge(2, 3, c);
  g.add_edge(1, 1, l1);
  g.add_edge(2, 2, l2);
  const auto r = mason_gain(g, "s", "t", 0.0);
  EXPECT_EQ(r.n_loops, 2u);
  EXPECT_LT(err(r.determinant, (1.0 - l1) * (1.0 - l2)), 1e-15);
  EXPECT_LT(err(r.value, a * b * c / ((1.0 - l1) * (1.0 - l2))), 1e-15);
}

TEST(FlowGraph, PathCofactorKeepsLoopsItDoesNotTouch) {
  FlowGraph g;
  g.add_node("s", NodeRole::Source);
  g.add_node("n1");
  g.add_node("n2");
  g.add_node("t", NodeRole::Sink);
  const cplx p1(0.8, 0.1), p2(0.2, -0.6), L(0.45, 0.3);
  g.add_edge(0, 1, p1);
  g.add_edge(1, 3, cplx(1.0));
  g.add_edge(0, 2, p2);
  g.add_edge(2, 3, cplx(1.0));
  g.add_edge(2, 2, L);
  const auto r = mason_gain(g, "s", "t", 0.0);
  EXPECT_EQ(r.n_paths, 2u);
  EXPECT_LT(err(r.value, p1 + p2 / (1.0 - L)), 1e-15);
}

TEST(FlowGraph, TouchingLoopsDoNotPair) {
  // two loops sharing node u: Delta = 1 - L1 - L2, no product term
  FlowGraph g;
  g.add_node("s", NodeRole::Source);
  g.add_node("u");
  g.add_node("v");
  g.add_node("w");
  g.add_node("t", NodeRole::Sink);
  const cplx uv(0.5, 0.1), vu(0.6, 0.0), uw(0.2, 0.3), wu(-0.9, 0.4);
  g.add_edge(0, 1, cplx(1.0));
  g.add_edge(1, 2, uv);
  g.add_edge(2, 1, vu);
  g.add_edge(1, 3, uw);
  g.add_edge(3, 1, wu);
  g.add_edge(1, 4, cplx(1.0));
  const auto r = mason_gain(g, "s", "t", 0.0);
  const cplx delta = 1.0 - uv * vu - uw * wu;
  EXPECT_LT(err(r.determinant, delta), 1e-15);
  EXPECT_LT(err(r.value, 1.0 / delta), 1e-15);
  EXPECT_LT(err(graph_determinant(g, 0.0), delta), 1e-14);
}

TEST(FlowGraph, SourceEqualsDestination) {
  FlowGraph g;
  g.add_node("s", NodeRole::Source);
  g.add_node("u");
  g.add_edge(0, 1, cplx(0.5));
  g.add_edge(1, 1, cplx(0.25));
  EXPECT_LT(err(mason_gain(g, "u", "u", 0.0).value, 1.0 / 0.75), 1e-15);
  EXPECT_LT(err(solve_gain(g, "u", "u", 0.0), 1.0 / 0.75), 1e-15);
}

TEST(FlowGraph, UnitLoopGainIsSingular) {
  FlowGraph g;
  g.add_node("s", NodeRole::Source);
  g.add_node("u");
  g.add_node("v");
  g.add_node("t", NodeRole::Sink);
  g.add_edge(0, 1, cplx(1.0));
  g.add_edge(1, 2, cplx(2.0));
  g.add_edge(2, 1, cplx(0.5));
  g.add_edge(2, 3, cplx(1.0));
  EXPECT_THROW(mason_gain(g, "s", "t", 0.0), SingularGraph);
  EXPECT_THROW(solve_gain(g, "s", "t", 0.0), SingularGraph);
  // SingularGraph is an instability
  EXPECT_THROW(mason_gain(g, "s", "t", 0.0), InstabilityError);
}

TEST(FlowGraph, ParallelEdgesMerge) {
  FlowGraph g;
  g.add_node("a", NodeRole::Source);
  g.add_node("b", NodeRole::Sink);
  g.add_edge("a", "b", [](double w) { return cplx(w, 0.0); }, "w");
  g.add_edge("a", "b", [](double) { return cplx(0.0, 2.0); }, "2i");
  ASSERT_EQ(g.edges().size(), 1u);
  EXPECT_EQ(g.edges()[0].gain(3.0), cplx(3.0, 2.0));
  EXPECT_EQ(g.edges()[0].label, "w + 2i");
  EXPECT_EQ(mason_gain(g, "a", "b", 1.0).value, cplx(1.0, 2.0));
}

TEST(FlowGraph, RejectsBadNodes) {
  FlowGraph g;
  g.add_node("a");
  EXPECT_THROW(g.add_node("a"), InvalidParameter);
  EXPECT_THROW(g.node("zz"), InvalidParameter);
  EXPECT_THROW(g.add_edge(0, 5, cplx(1.0)), InvalidParameter);
  for (int i = 1; i < 64; ++i) g.add_node("n" + std::to_string(i));
  EXPECT_THROW(g.add_node("overflow"), InvalidParameter);
}

TEST(FlowGraph, DotListsNodesAndSymbolicLabels) {
  const auto op = fixtures::synthetic(Configuration::AntiStokes, 0.5);
  const std::string dot = to_dot(build_antistokes_graph(op), "as");
  EXPECT_NE(dot.find("digraph as {"), std::string::npos);
  EXPECT_NE(dot.find("\"c_in\" [shape=box]"), std::string::npos);
  EXPECT_NE(dot.find("\"b\" [shape=circle]"), std::string::npos);
  EXPECT_NE(dot.find("\"b\" -> \"a_plus\" [label=\"i g+ chi+\"]"), std::string::npos);
  EXPECT_EQ(dot.back(), '\n');
}

TEST(FlowGraph, MasonMatchesLinearSolveOnRandomGraphs) {
  oracle::Noise rng(21);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 6;
    FlowGraph g;
    for (int k = 0; k < n; ++k) g.add_node("n" + std::to_string(k));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (rng.uniform(0, 1) < 0.3) {
          const cplx c(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6));
          const double tau = rng.uniform(0.0, 2.0);
          g.add_edge(a, b, [c, tau](double w) { return c / cplx(1.0, w * tau); });
        }
    const double w = rng.uniform(-3, 3);
    const std::size_t s = 0, t = n - 1;
    MasonPlan plan(g, s, t);
    GainResult m;
    try {
      m = plan.evaluate(w);
    } catch (const SingularGraph&) {
      continue;
    }
    const Eigen::MatrixXcd I_A = Eigen::MatrixXcd::Identity(n, n) - g.adjacency(w);
    if (std::abs(I_A.determinant()) < 1e-6) continue;
    // oracle: full inverse, independent of solve_gain's LU path
    const cplx ref = I_A.inverse()(t, s);
    EXPECT_LT(err(m.value, ref), 1e-9) << "trial " << trial;
    EXPECT_LT(err(m.determinant, graph_determinant(g, w)), 1e-9) << "trial " << trial;
    ++checked;
  }
  EXPECT_GT(checked, 150);
}

TEST(TransducerGraphs, LoopStructure) {
  for (auto c : {Configuration::AntiStokes, Configuration::Stokes}) {
    const auto op = fixtures::synthetic(c, 0.7);
    const FlowGraph g = build_graph(op);
    MasonPlan plan(g, g.node(input_node(c, Port::Microwave)), g.node(output_node(c, Port::Optical)));
    EXPECT_EQ(plan.n_loops(), 1u);
    EXPECT_EQ(plan.n_paths(), 1u);
    MasonPlan refl(g, g.node(input_node(c, Port::Optical)), g.node(output_node(c, Port::Optical)));
    EXPECT_EQ(refl.n_paths(), 3u);  // direct, converting mode, spectator
  }
}

TEST(TransducerGraphs, LoopGainSignDiffersBetweenConfigurations) {
  // beam splitter: loop -|g|^2 chi_o chi_m; squeezer: +|g|^2 chi_o chi_m
  for (auto c : {Configuration::AntiStokes, Configuration::Stokes}) {
    const auto op = fixtures::synthetic(c, 0.7);
    const FlowGraph g = build_graph(op);
    MasonPlan plan(g, g.node("c_in"), g.node("c_out"));
    const auto L = plan.loop_gains(0.0);
    ASSERT_EQ(L.size(), 1u);
    const double expect = std::norm(op.g()) * 4.0 / (op.kappa_o() * op.mech.kappa_m);
    EXPECT_NEAR(L[0].real(), c == Configuration::AntiStokes ? -expect : expect, 1e-12);
    EXPECT_NEAR(L[0].imag(), 0.0, 1e-12);
  }
}

TEST(TransducerGraphs, StokesAtUnitCooperativityIsSingular) {
  const auto op = fixtures::synthetic(Configuration::Stokes, 1.0);
  const FlowGraph g = build_graph(op);
  EXPECT_THROW(mason_gain(g, "c_in", "a_out_dag", 0.0), SingularGraph);
}
