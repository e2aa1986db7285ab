#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "dykstra/allocation.hpp"
#include "dykstra/bench.hpp"
#include "helpers.hpp"

using namespace dykstra;

namespace {

// The three-node line instance whose pairwise subset scheme stalls at the
// origin: a quadratic pulling left, a free node, a quadratic pulling right.
AllocationState stuck_instance() {
  return make_allocation({ConvexFunction::quadratic(1.0, {-1.0}),
                          ConvexFunction::zero(1),
                          ConvexFunction::quadratic(1.0, {1.0})});
}

}  // namespace

TEST_CASE("ascend_subset on the stuck instance") {
  SUBCASE("pairs cannot move from the origin") {
    AllocationState st = stuck_instance();
    CHECK_FALSE(ascend_subset(st, {0, 1}));
    CHECK_FALSE(ascend_subset(st, {1, 2}));
    CHECK(st.y[0][0] == 0.0);
    CHECK(st.y[1][0] == 0.0);
    CHECK(st.y[2][0] == 0.0);
    CHECK(allocation_objective(st) == doctest::Approx(0.0));
  }

  SUBCASE("the full triple reaches the optimum") {
    AllocationState st = stuck_instance();
    CHECK(ascend_subset(st, {0, 1, 2}));
    CHECK(st.y[0][0] == doctest::Approx(1.0));
    CHECK(st.y[1][0] == doctest::Approx(0.0));
    CHECK(st.y[2][0] == doctest::Approx(-1.0));
    CHECK(allocation_objective(st) == doctest::Approx(-1.0));
    CHECK(norm2(st.y_sum()) <= 1e-12);
  }

  SUBCASE("two quadratics split the gradient") {
    AllocationState st = make_allocation({ConvexFunction::quadratic(1.0, {0.0}),
                                          ConvexFunction::quadratic(1.0, {2.0})});
    CHECK(ascend_subset(st, {0, 1}));
    CHECK(st.y[0][0] == doctest::Approx(1.0));
    CHECK(st.y[1][0] == doctest::Approx(-1.0));
    CHECK(subset_consensus_x(st, {0, 1})[0] == doctest::Approx(1.0));
  }
}

TEST_CASE("subset_consensus_x at the stuck point") {
  AllocationState st = stuck_instance();
  CHECK(subset_consensus_x(st, {0, 1})[0] == doctest::Approx(-1.0));
  CHECK(subset_consensus_x(st, {1, 2})[0] == doctest::Approx(1.0));
  CHECK(subset_consensus_x(st, {0, 1, 2})[0] == doctest::Approx(0.0));
}

TEST_CASE("detect_stuck") {
  SUBCASE("flags the pairwise scheme at the origin") {
    AllocationState st = stuck_instance();
    StuckReport r = detect_stuck(st, {{0, 1}, {1, 2}});
    CHECK(r.suspect_stuck);
    CHECK(r.subset_x[0][0] == doctest::Approx(-1.0));
    CHECK(r.subset_x[1][0] == doctest::Approx(1.0));
  }

  SUBCASE("a smooth instance at its optimum is clean") {
    AllocationState st = make_allocation({ConvexFunction::quadratic(1.0, {0.0}),
                                          ConvexFunction::quadratic(1.0, {1.0}),
                                          ConvexFunction::quadratic(1.0, {2.0})});
    ascend_subset(st, {0, 1, 2});
    StuckReport r = detect_stuck(st, {{0, 1}, {1, 2}, {0, 1, 2}});
    CHECK_FALSE(r.suspect_stuck);
  }

  SUBCASE("a single subset covering everything is its own optimum") {
    AllocationState st = stuck_instance();
    ascend_subset(st, {0, 1, 2});
    StuckReport r = detect_stuck(st, {{0, 1, 2}});
    CHECK_FALSE(r.suspect_stuck);
  }
}

TEST_CASE("check_smooth_overlap") {
  SUBCASE("the stuck instance violates the overlap condition") {
    // Conjugate of the free node is not smooth; the pair overlap is {1}.
    OverlapCertificate c =
        check_smooth_overlap({{0, 1}, {1, 2}}, {true, false, true});
    CHECK_FALSE(c.ok);
    CHECK(c.violating == std::pair<int, int>{0, 1});
  }

  SUBCASE("an all-smooth chain passes with a witness") {
    OverlapCertificate c =
        check_smooth_overlap({{0, 1}, {1, 2}, {2, 3}}, {true, true, true, true});
    CHECK(c.ok);
    CHECK(c.chain.size() == 3);
  }

  SUBCASE("disjoint subsets fail coverage linking") {
    OverlapCertificate c = check_smooth_overlap({{0, 1}, {2, 3}},
                                                {true, true, true, true});
    CHECK_FALSE(c.ok);
  }
}

TEST_CASE("lifting correspondence") {
  SUBCASE("zeros map to zeros") {
    LiftedDuals duals;
    duals.z.assign(3, zeros(1));
    duals.z_e = BlockVector(3, 1);
    PairDuals p = lift_forward(duals, 1);
    for (int i = 0; i < 3; ++i) {
      CHECK(norm2(p.y0[i]) == 0.0);
      CHECK(norm2(p.y1[i]) == 0.0);
    }
  }

  SUBCASE("objectives agree and maps invert on random points") {
    std::mt19937_64 rng(23);
    const int n = 3, d = 2;
    auto funcs = testing::random_funcs(n, d, rng, false);
    BlockVector x0 = testing::random_block_vector(n, d, rng);
    for (int trial = 0; trial < 100; ++trial) {
      LiftedDuals duals;
      for (int i = 0; i < n; ++i) duals.z.push_back(testing::random_vec(d, rng));
      duals.z_e = testing::random_diag_orth(n, d, rng);
      PairDuals p = lift_forward(duals, d);
      // Constraint sum_i (y0 + y1) = 0 holds by construction.
      Vec s = zeros(d);
      for (int i = 0; i < n; ++i) {
        axpy(s, 1.0, p.y0[i]);
        axpy(s, 1.0, p.y1[i]);
      }
      CHECK(norm2(s) <= 1e-12 * (1.0 + duals.z_e.norm()));
      double a = pair_dual_objective(p, x0, funcs);
      double b = aggregated_dual_objective(duals, x0, funcs);
      if (std::isfinite(a) || std::isfinite(b))
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
      LiftedDuals back = lift_inverse(p, d);
      for (int i = 0; i < n; ++i) {
        CHECK(norm2(sub(back.z[i], duals.z[i])) <= 1e-12);
        CHECK(norm2(sub(back.z_e.blocks[i], duals.z_e.blocks[i])) <= 1e-12);
      }
    }
  }

  SUBCASE("allocation states lift with zero y0") {
    AllocationState st = stuck_instance();
    ascend_subset(st, {0, 1, 2});
    LiftedDuals duals = lift_to_dykstra(st, 1);
    CHECK(duals.z[0][0] == doctest::Approx(1.0));
    CHECK(in_diag_orth(duals.z_e, 1e-12));
  }
}

TEST_CASE("run_allocation") {
  SUBCASE("pairwise schedule on the stuck instance stays flat and flags") {
    AllocationState st = stuck_instance();
    AllocationRunResult r = run_allocation(st, {{0, 1}, {1, 2}}, {100, 1e-12});
    for (const auto& row : r.trace.rows) CHECK(row.F == doctest::Approx(0.0));
    CHECK(r.stuck.suspect_stuck);
  }

  SUBCASE("including the full triple reaches G = -1") {
    AllocationState st = stuck_instance();
    AllocationRunResult r =
        run_allocation(st, {{0, 1}, {1, 2}, {0, 1, 2}}, {100, 1e-12});
    CHECK(allocation_objective(st) == doctest::Approx(-1.0));
    CHECK_FALSE(r.stuck.suspect_stuck);
    // G never increases along the trace.
    for (std::size_t k = 1; k < r.trace.rows.size(); ++k)
      CHECK(r.trace.rows[k].F <=
            r.trace.rows[k - 1].F + 1e-12 * (1.0 + std::fabs(r.trace.rows[k].F)));
  }

  SUBCASE("overlapping quadratics converge to the centralized optimum") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<ConvexFunction> funcs;
      for (int i = 0; i < 4; ++i)
        funcs.push_back(ConvexFunction::quadratic(0.5 + 0.5 * (rng() % 3),
                                                  testing::random_vec(1, rng)));
      AllocationOracle oracle = oracle_allocation(funcs);
      AllocationState st = make_allocation(funcs);
      run_allocation(st, {{0, 1}, {1, 2}, {2, 3}}, {5000, 0.0});
      for (int i = 0; i < 4; ++i)
        CHECK(norm2(sub(st.y[i], oracle.y[i])) <= 1e-6);
      CHECK(norm2(st.y_sum()) <= 1e-12);
    }
  }
}
