#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "mcc/multicut.hpp"
#include "oracles.hpp"

using namespace mcc;

namespace {

SimilarityGraph three_node() { return SimilarityGraph(3, {2.0, 1.0, -3.0}); }

// w(0,1)=3, w(2,3)=3, w(0,2)=1, every other pair -5.
SimilarityGraph four_node() {
  // Triangle order: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
  return SimilarityGraph(4, {3.0, 1.0, -5.0, -5.0, -5.0, 3.0});
}

Partition from(std::vector<std::uint32_t> raw) { return Partition::from_labels(raw); }

}  // namespace

TEST(PartitionTest, CanonicalOrderBySizeThenSmallestMember) {
  const auto p = from({7, 3, 3, 9, 9, 9, 1});
  EXPECT_EQ(p.assignment(), (std::vector<ClusterId>{2, 1, 1, 0, 0, 0, 3}));
  EXPECT_EQ(p.k(), 4u);
  EXPECT_EQ(p.sizes(), (std::vector<std::size_t>{3, 2, 1, 1}));
  EXPECT_EQ(from({5, 5, 2}), from({0, 0, 1}));
}

TEST(Cost, HandCases) {
  const auto g = three_node();
  EXPECT_EQ(cost(g, Partition::one_cluster(3)), 0.0);
  EXPECT_EQ(cost(g, from({0, 0, 1})), -2.0);
  EXPECT_EQ(cost(g, Partition::singletons(3)), 0.0);  // 2 + 1 - 3
  EXPECT_EQ(cost(four_node(), Partition::singletons(4)), 3 + 1 - 5 - 5 - 5 + 3);
  EXPECT_THROW(cost(g, Partition::singletons(4)), InputError);
}

TEST(Cost, MatchesDenseOracle) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng() % 9;
    const auto g = oracle::random_graph(rng, n);
    const auto p = oracle::random_partition(rng, n, 4);
    std::vector<std::size_t> label(p.assignment().begin(), p.assignment().end());
    EXPECT_NEAR(cost(g, p), oracle::cost(oracle::dense(g), label), 1e-12);
  }
}

TEST(Gaec, ThreeNodeInstance) {
  const auto r = solve_gaec(three_node());
  EXPECT_EQ(r.partition, from({0, 0, 1}));
  EXPECT_EQ(r.cost, -2.0);
  EXPECT_EQ(r.solver, SolverKind::gaec);
}

TEST(Gaec, AllNegativeGivesSingletons) {
  const SimilarityGraph g(4, {-1, -2, -0.5, -3, -1, -0.25});
  const auto r = solve_gaec(g);
  EXPECT_EQ(r.partition.k(), 4u);
  EXPECT_DOUBLE_EQ(r.cost, -7.75);
}

TEST(Gaec, AllPositiveGivesOneCluster) {
  const SimilarityGraph g(5, std::vector<double>(10, 0.3));
  const auto r = solve_gaec(g);
  EXPECT_EQ(r.partition.k(), 1u);
  EXPECT_EQ(r.cost, 0.0);
}

TEST(Gaec, ZeroWeightIsContracted) {
  // "highest edge weight >= 0" includes zero.
  const auto r = solve_gaec(SimilarityGraph(2, {0.0}));
  EXPECT_EQ(r.partition.k(), 1u);
}

TEST(Gaec, AdditiveContractionSumsParallelEdges) {
  // After {0,1} merges, the edges to 2 sum to +0.8 and those to 3 to -2.
  // (0,1)=5 (0,2)=0.4 (0,3)=-1 (1,2)=0.4 (1,3)=-1 (2,3)=-1
  const SimilarityGraph g(4, {5, 0.4, -1, 0.4, -1, -1});
  const auto r = solve_gaec(g);
  EXPECT_EQ(r.partition, from({0, 0, 0, 1}));
  // (0,1)=1 (0,2)=-0.6 (1,2)=0.5: after merging {0,1}, aggregate to 2 is -0.1 < 0.
  const auto r2 = solve_gaec(SimilarityGraph(3, {1, -0.6, 0.5}));
  EXPECT_EQ(r2.partition, from({0, 0, 1}));
}

TEST(Gaec, TieBreakPrefersSmallerRepresentativePair) {
  // (0,1)=1 (0,2)=-3 (1,2)=1: both positive edges tie; (0,1) goes first, then {0,1}-2 = -2.
  const auto r = solve_gaec(SimilarityGraph(3, {1, -3, 1}));
  EXPECT_EQ(r.partition, from({0, 0, 1}));
}

TEST(Gaec, SingleNodeAndEmpty) {
  const auto r = solve_gaec(SimilarityGraph(1, {}));
  EXPECT_EQ(r.partition.k(), 1u);
  EXPECT_EQ(r.cost, 0.0);
}

TEST(Klj, FourNodeFromOneCluster) {
  const auto r = solve_klj(four_node(), Partition::one_cluster(4));
  EXPECT_EQ(r.partition, from({0, 0, 1, 1}));
  EXPECT_EQ(r.cost, -14.0);
}

TEST(Klj, OptimalInitNeedsOneSweep) {
  const auto g = four_node();
  const auto init = from({0, 0, 1, 1});
  const auto r = solve_klj(g, init);
  EXPECT_EQ(r.partition, init);
  EXPECT_EQ(r.iterations, 1u);
}

TEST(Klj, JoinsClustersWithPositiveAggregate) {
  // Each single node prefers its own cluster, but the two clusters attract overall.
  // (0,1)=5 (0,2)=1 (0,3)=1 (1,2)=1 (1,3)=1 (2,3)=5
  const SimilarityGraph g(4, {5, 1, 1, 1, 1, 5});
  const auto r = solve_klj(g, from({0, 0, 1, 1}));
  EXPECT_EQ(r.partition.k(), 1u);
  EXPECT_EQ(r.cost, 0.0);
}

TEST(Klj, MovesAreStrictlyImprovingAndCostsAreConsistent) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng() % 14;
    const auto g = oracle::random_graph(rng, n);
    const auto init = oracle::random_partition(rng, n, 1 + rng() % n);
    double last = cost(g, init);
    KljOptions opt;
    opt.on_move = [&](std::span<const ClusterId> a, double tracked) {
      const double now = cut_cost(g, a);
      EXPECT_LT(now, last);
      EXPECT_NEAR(now, tracked, 1e-9);
      last = now;
    };
    const auto r = solve_klj(g, init, opt);
    EXPECT_LE(r.cost, cost(g, init));
    EXPECT_DOUBLE_EQ(r.cost, cost(g, r.partition));
  }
}

TEST(Klj, SweepCapIsHonoured) {
  std::mt19937_64 rng(2);
  const auto g = oracle::random_graph(rng, 30);
  KljOptions opt;
  opt.max_sweeps = 1;
  EXPECT_EQ(solve_klj(g, Partition::singletons(30), opt).iterations, 1u);
}

TEST(Klj, RejectsMismatchedInit) {
  EXPECT_THROW(solve_klj(three_node(), Partition::singletons(2)), InputError);
}

TEST(Solve, ComposesGaecAndKlj) {
  for (auto mode : {SolverKind::gaec, SolverKind::gaec_kl}) {
    const auto r = solve(three_node(), mode);
    EXPECT_EQ(r.cost, -2.0);
    EXPECT_EQ(r.solver, mode);
    EXPECT_EQ(solve(SimilarityGraph(4, std::vector<double>(6, 1.0)), mode).partition.k(), 1u);
  }
  EXPECT_THROW(solve(three_node(), SolverKind::exact), InputError);
  EXPECT_EQ(parse_solver_mode("gaec-kl"), SolverKind::gaec_kl);
  EXPECT_THROW(parse_solver_mode("exact"), InputError);
}

TEST(Solve, KljNeverWorseThanGaec) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 300; ++t) {
    const auto g = oracle::random_graph(rng, 3 + rng() % 25);
    EXPECT_LE(solve(g, SolverKind::gaec_kl).cost, solve(g, SolverKind::gaec).cost + 1e-12);
  }
}

TEST(Exact, RestrictedGrowthStringsCountBellNumbers) {
  const std::size_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147};
  for (std::size_t n = 1; n < 10; ++n) {
    std::size_t count = 0;
    std::vector<ClusterId> prev;
    for_each_restricted_growth_string(n, [&](std::span<const ClusterId> a, std::size_t from) {
      ++count;
      EXPECT_EQ(a[0], 0u);
      ClusterId mx = 0;
      for (std::size_t i = 1; i < n; ++i) {
        EXPECT_LE(a[i], mx + 1);
        mx = std::max(mx, a[i]);
      }
      if (!prev.empty()) {
        EXPECT_TRUE(std::lexicographical_compare(prev.begin(), prev.end(), a.begin(), a.end()));
        EXPECT_TRUE(std::equal(prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(from), a.begin()));
        EXPECT_NE(prev[from], a[from]);
      }
      prev.assign(a.begin(), a.end());
    });
    EXPECT_EQ(count, bell[n]) << "n=" << n;
  }
}

TEST(Exact, HandCases) {
  const auto r = solve_exact(three_node());
  EXPECT_EQ(r.cost, -2.0);
  EXPECT_EQ(r.partition, from({0, 0, 1}));
  EXPECT_EQ(solve_exact(four_node()).cost, -14.0);

  const auto one = solve_exact(SimilarityGraph(1, {}));
  EXPECT_EQ(one.partition.k(), 1u);
  EXPECT_EQ(one.cost, 0.0);

  const SimilarityGraph neg(4, {-1, -2, -0.5, -3, -1, -0.25});
  EXPECT_EQ(solve_exact(neg).partition, Partition::singletons(4));
}

TEST(Exact, FirstMinimumInEnumerationOrder) {
  // All-zero weights: every partition costs 0; the first string is all zeros.
  EXPECT_EQ(solve_exact(SimilarityGraph(4, std::vector<double>(6, 0.0))).partition.k(), 1u);
}

TEST(Exact, RefusesMoreThanTwelveNodes) {
  try {
    solve_exact(SimilarityGraph(13, std::vector<double>(pair_count(13), 0.0)));
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("n=13"), std::string::npos);
  }
}

TEST(Exact, MatchesRecursiveOracle) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 100; ++t) {
    const auto g = oracle::random_graph(rng, 1 + rng() % 8);
    EXPECT_NEAR(solve_exact(g).cost, oracle::min_cost(g), 1e-12);
  }
}

TEST(Heuristics, DominatedByExactOnRandomSmallGraphs) {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 500; ++t) {
    const auto g = oracle::random_graph(rng, 3 + rng() % 8);
    const double exact = solve_exact(g).cost;
    EXPECT_LE(exact, solve_gaec(g).cost + 1e-12);
    EXPECT_LE(exact, solve(g, SolverKind::gaec_kl).cost + 1e-12);
  }
}

TEST(Heuristics, Deterministic) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 50; ++t) {
    const auto g = oracle::random_graph(rng, 5 + rng() % 30);
    EXPECT_EQ(solve(g, SolverKind::gaec_kl).partition, solve(g, SolverKind::gaec_kl).partition);
  }
}

TEST(Heuristics, PermutationEquivariantCost) {
  // Node relabeling must not change the optimum; heuristics are checked on
  // cost up to tie-breaking, the exact solver on the cost exactly.
  std::mt19937_64 rng(47);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 3 + rng() % 6;
    const auto g = oracle::random_graph(rng, n);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> w(pair_count(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) w[triangle_index_unordered(n, perm[i], perm[j])] = g.w(i, j);
    const SimilarityGraph h(n, std::move(w));

    EXPECT_NEAR(solve_exact(g).cost, solve_exact(h).cost, 1e-12);

    // Generic weights have no ties, so the GAEC contraction sequence is permuted too.
    const auto pg = solve_gaec(g).partition;
    const auto ph = solve_gaec(h).partition;
    std::vector<ClusterId> mapped(n);
    for (std::size_t i = 0; i < n; ++i) mapped[perm[i]] = pg[i];
    EXPECT_EQ(Partition::from_labels(mapped), ph);
  }
}

TEST(Feasibility, PartitionLabelingsSatisfyCycleConstraints) {
  // For every cycle in K_n and every cut edge on it, another edge of the
  // cycle must be cut as well.
  std::mt19937_64 rng(53);
  const std::size_t n = 5;
  for (int t = 0; t < 200; ++t) {
    const auto p = oracle::random_partition(rng, n, 1 + rng() % n);
    const auto cut = [&](std::size_t a, std::size_t b) { return p[a] != p[b]; };
    // Enumerate cycles as vertex sequences of length 3..n with distinct vertices.
    std::vector<std::size_t> verts(n);
    std::iota(verts.begin(), verts.end(), 0);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<std::size_t> sub;
      for (std::size_t v = 0; v < n; ++v)
        if (mask >> v & 1u) sub.push_back(v);
      if (sub.size() < 3) continue;
      do {
        std::size_t cuts = 0;
        for (std::size_t i = 0; i < sub.size(); ++i) cuts += cut(sub[i], sub[(i + 1) % sub.size()]);
        EXPECT_NE(cuts, 1u);
      } while (std::next_permutation(sub.begin() + 1, sub.end()));
    }
  }
}
