#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "spillover/pvalue.hpp"
#include "test_support.hpp"

using namespace spillover;
using spillover::testing::assignment_of;

namespace {

const TestStatistic kBond{StatKind::BondEdgeContrast, Arm::Weighted};

Graph c6() { return new_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}}); }

// Exact p-value over cell-preserving permutations, by walking every
// permutation of the vertex set and keeping those that respect the cells.
double brute_force_permutation_p(const Graph& g, const std::vector<std::uint64_t>& cell,
                                 const TreatmentAssignment& z, const std::vector<double>& y,
                                 const TestStatistic& s) {
    const auto t_obs = *evaluate(s, g, z.z, y);
    std::vector<Vertex> perm(g.vertex_count());
    std::iota(perm.begin(), perm.end(), Vertex{0});
    std::size_t total = 0, exceed = 0;
    do {
        bool ok = true;
        for (Vertex v = 0; v < perm.size(); ++v) ok = ok && cell[perm[v]] == cell[v];
        if (!ok) continue;
        const auto t = evaluate(s, relabel(g, VertexPermutation(perm)), z.z, y);
        if (!t) continue;
        ++total;
        exceed += *t > t_obs ? 1 : 0;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(exceed) / static_cast<double>(total);
}

}  // namespace

TEST(PValueMc, ConstantStatistic) {
    // Equal outcomes make T_bond zero on every graph.
    Rng rng(1);
    const auto g = c6();
    const auto z = assignment_of({1, 0, 1, 0, 0, 1});
    const std::vector<double> y(6, 3.0);
    constexpr std::size_t kM = 50;
    auto sampler = make_sampler(NullClassMode::DegreeSequence, g, &z);
    const auto raw = pvalue_mc(g, z, y, kBond, sampler, NullClassMode::DegreeSequence, kM, Estimator::Raw, rng);
    EXPECT_EQ(raw.p_value, 0.0);
    EXPECT_EQ(raw.n_ties, kM);
    const auto plus = pvalue_mc(g, z, y, kBond, sampler, NullClassMode::DegreeSequence, kM, Estimator::PlusOne, rng);
    EXPECT_DOUBLE_EQ(plus.p_value, 1.0 / (kM + 1));
}

TEST(PValueMc, ZeroStepChainTiesEveryDraw) {
    Rng rng(2);
    const auto g = c6();
    const auto z = assignment_of({1, 0, 1, 0, 0, 1});
    const std::vector<double> y = {0.3, 1.2, -0.5, 2.0, 0.1, 0.7};
    AnySampler fixed = FixedSampler(g);
    for (std::size_t m : {1U, 7U, 100U}) {
        const auto r = pvalue_mc(g, z, y, kBond, fixed, NullClassMode::DegreeSequence, m, Estimator::Raw, rng);
        EXPECT_EQ(r.p_value, 0.0);
        EXPECT_EQ(r.n_ties, m);
        EXPECT_EQ(r.n_draws, m);
        ASSERT_EQ(r.null_draws.size(), m);
        for (const auto& t : r.null_draws) EXPECT_EQ(*t, r.t_obs);
    }
}

TEST(PValueMc, Errors) {
    Rng rng(3);
    const auto g = c6();
    const auto z = assignment_of({1, 1, 1, 1, 1, 1});
    const std::vector<double> y(6, 1.0);
    auto sampler = make_sampler(NullClassMode::DegreeIsomorphism, g, &z);
    try {
        pvalue_mc(g, z, y, kBond, sampler, NullClassMode::DegreeIsomorphism, 10, Estimator::Raw, rng);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ObservedStatisticUndefined);
    }
    const auto mixed = assignment_of({1, 0, 1, 0, 1, 0});
    EXPECT_THROW(pvalue_mc(g, mixed, y, kBond, sampler, NullClassMode::DegreeIsomorphism, 0, Estimator::Raw, rng),
                 Error);
    const std::vector<double> short_y(5, 1.0);
    EXPECT_THROW(pvalue_mc(g, mixed, short_y, kBond, sampler, NullClassMode::DegreeIsomorphism, 5, Estimator::Raw,
                           rng),
                 Error);
}

TEST(PValueMc, ExcessiveDegeneracy) {
    // An empty null graph leaves T_bond undefined on every draw.
    Rng rng(4);
    const auto g = c6();
    const auto z = assignment_of({1, 0, 1, 0, 1, 0});
    const std::vector<double> y = {1, 2, 3, 4, 5, 6};
    AnySampler empty = ErdosRenyiSampler(6, 0.0);
    try {
        pvalue_mc(g, z, y, kBond, empty, NullClassMode::ErdosRenyi, 20, Estimator::Raw, rng);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ExcessiveDegeneracy);
    }
}

TEST(PValueMc, UndefinedDrawsLeaveTheDenominator) {
    // Sparse ER draws: some leave T_bond undefined, and those are excluded.
    Rng rng(5);
    const auto g = new_graph(8, {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {1, 2}});
    const auto z = assignment_of({1, 0, 0, 1, 1, 0, 0, 1});
    const std::vector<double> y = {1, 2, 3, 4, 5, 6, 7, 8};
    AnySampler er = ErdosRenyiSampler(8, 0.18);
    const TestStatistic s = kBond;
    const PValueTarget one[] = {{y, s}};
    const auto out = pvalue_mc_batch(g, z, one, er, NullClassMode::ErdosRenyi, 2000, Estimator::Raw, rng);
    if (out[0].report) {
        const auto& r = *out[0].report;
        std::size_t undefined = 0, exceed = 0;
        for (const auto& t : r.null_draws) {
            if (!t) {
                ++undefined;
            } else if (*t > r.t_obs) {
                ++exceed;
            }
        }
        EXPECT_EQ(undefined, r.n_undefined);
        EXPECT_GT(undefined, 0U);
        EXPECT_DOUBLE_EQ(r.p_value, double(exceed) / double(2000 - undefined));
    } else {
        EXPECT_EQ(out[0].error->code(), Errc::ExcessiveDegeneracy);
    }
}

TEST(PValueMcBatch, PerTargetFailuresAreReturned) {
    Rng rng(6);
    const auto g = c6();
    const auto z = assignment_of({1, 0, 0, 0, 0, 0});
    const std::vector<double> y = {1, 2, 3, 4, 5, 6};
    // T_I on the control arm: controls 1 and 5 are exposed, 2..4 are not -> defined.
    // T_I on the treated arm: one treated unit, never exposed -> undefined.
    const PValueTarget targets[] = {{y, {StatKind::HasTreatedNeighbor, Arm::Control}},
                                    {y, {StatKind::HasTreatedNeighbor, Arm::Treated}}};
    auto sampler = make_sampler(NullClassMode::DegreeIsomorphism, g, &z);
    const auto out = pvalue_mc_batch(g, z, targets, sampler, NullClassMode::DegreeIsomorphism, 100, Estimator::Raw, rng);
    ASSERT_TRUE(out[0].report);
    EXPECT_FALSE(out[0].error);
    EXPECT_FALSE(out[1].report);
    ASSERT_TRUE(out[1].error);
    EXPECT_EQ(out[1].error->code(), Errc::ObservedStatisticUndefined);
}

TEST(PValueMcBatch, TargetsShareDraws) {
    // Scoring two targets together equals scoring each alone with the same stream.
    const auto g = c6();
    const auto z = assignment_of({1, 0, 1, 1, 0, 0});
    const std::vector<double> y1 = {0.1, 0.9, -0.3, 1.4, 0.2, -1.0};
    const std::vector<double> y2 = {2.0, 0.0, 1.0, -1.0, 0.5, 0.25};
    const TestStatistic q{StatKind::QuantContrast, Arm::Weighted};
    const PValueTarget both[] = {{y1, kBond}, {y2, q}};
    Rng a(7);
    auto s1 = make_sampler(NullClassMode::DegreeSequence, g, &z);
    const auto joint = pvalue_mc_batch(g, z, both, s1, NullClassMode::DegreeSequence, 300, Estimator::Raw, a);
    Rng b(7);
    auto s2 = make_sampler(NullClassMode::DegreeSequence, g, &z);
    const auto alone = pvalue_mc(g, z, y2, q, s2, NullClassMode::DegreeSequence, 300, Estimator::Raw, b);
    ASSERT_TRUE(joint[1].report);
    EXPECT_EQ(joint[1].report->null_draws, alone.null_draws);
    EXPECT_EQ(joint[1].report->p_value, alone.p_value);
}

TEST(PValueExact, SingletonClassGivesZero) {
    const auto star = new_graph(4, {{0, 1}, {0, 2}, {0, 3}});
    const auto z = assignment_of({0, 1, 0, 0});
    const std::vector<double> y = {5, 1, 2, 3};
    const auto r = pvalue_exact(star, z, y, kBond, NullClassMode::DegreeSequence);
    EXPECT_EQ(r.p_value, 0.0);
    EXPECT_EQ(r.n_draws, 1U);
    EXPECT_EQ(r.n_ties, 1U);
}

TEST(PValueExact, ConstantStatisticGivesZero) {
    const auto z = assignment_of({1, 0, 1, 0, 0, 1});
    const auto r = pvalue_exact(c6(), z, std::vector<double>(6, -2.0), kBond, NullClassMode::DegreeSequence);
    EXPECT_EQ(r.p_value, 0.0);
    EXPECT_EQ(r.n_draws, 70U);
}

TEST(PValueExact, C6MatchesMonteCarlo) {
    const auto g = c6();
    const auto z = assignment_of({1, 1, 0, 1, 0, 0});
    const std::vector<double> y = {0.4, 2.5, 1.1, -0.7, 0.9, 1.8};
    const auto exact = pvalue_exact(g, z, y, kBond, NullClassMode::DegreeSequence);
    ASSERT_EQ(exact.n_draws, 70U);
    ASSERT_GT(exact.p_value, 0.0);
    ASSERT_LT(exact.p_value, 1.0);

    constexpr std::size_t kM = 100000;
    Rng rng(8);
    auto sampler = make_sampler(NullClassMode::DegreeSequence, g, &z);
    const auto mc = pvalue_mc(g, z, y, kBond, sampler, NullClassMode::DegreeSequence, kM, Estimator::Raw, rng);
    const double se = std::sqrt(exact.p_value * (1 - exact.p_value) / kM);
    EXPECT_LE(std::abs(mc.p_value - exact.p_value), 3 * se);
}

TEST(PValueExact, PermutationModesMatchBruteForce) {
    Rng rng(9);
    const TestStatistic stats[] = {kBond, {StatKind::QuantContrast, Arm::Weighted},
                                   {StatKind::HasTreatedNeighbor, Arm::Control}};
    int compared = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 5 + trial % 3;
        const auto g = spillover::testing::random_graph(n, 0.4, rng);
        const auto z = spillover::testing::mixed_assignment(n, rng);
        const auto y = spillover::testing::random_outcomes(n, rng);
        for (const auto& s : stats) {
            if (!evaluate(s, g, z.z, y)) continue;
            for (auto mode : {NullClassMode::DegreeIsomorphism, NullClassMode::BlockIsomorphism}) {
                const auto cells = mode == NullClassMode::DegreeIsomorphism ? degree_cells(g)
                                                                             : degree_treatment_cells(g, z);
                try {
                    const auto r = pvalue_exact(g, z, y, s, mode);
                    EXPECT_NEAR(r.p_value, brute_force_permutation_p(g, cells, z, y, s), 1e-12);
                    ++compared;
                } catch (const Error& e) {
                    EXPECT_EQ(e.code(), Errc::ExcessiveDegeneracy);
                }
            }
        }
    }
    EXPECT_GT(compared, 100);
}

TEST(PValueExact, TooLarge) {
    const auto g = new_graph(11, {{0, 1}, {2, 3}});
    const auto z = assignment_of({1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0});
    try {
        pvalue_exact(g, z, std::vector<double>(11, 1.0), kBond, NullClassMode::DegreeSequence);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::TooLargeForEnumeration);
    }
}

TEST(PValueProperties, RangeAndEstimatorOrdering) {
    Rng rng(10);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 6 + trial % 20;
        const auto g = spillover::testing::random_graph(n, 0.3, rng);
        const auto z = spillover::testing::mixed_assignment(n, rng);
        const auto y = spillover::testing::random_outcomes(n, rng);
        if (!evaluate(kBond, g, z.z, y)) continue;
        const auto seed = rng();
        Rng a(seed);
        Rng b(seed);
        auto sa = make_sampler(NullClassMode::DegreeSequence, g, &z);
        auto sb = make_sampler(NullClassMode::DegreeSequence, g, &z);
        const auto raw = pvalue_mc(g, z, y, kBond, sa, NullClassMode::DegreeSequence, 60, Estimator::Raw, a);
        const auto plus = pvalue_mc(g, z, y, kBond, sb, NullClassMode::DegreeSequence, 60, Estimator::PlusOne, b);
        EXPECT_GE(raw.p_value, 0.0);
        EXPECT_LE(raw.p_value, 1.0);
        EXPECT_GT(plus.p_value, raw.p_value - 1e-15);
        EXPECT_LE(plus.p_value, 1.0);
        EXPECT_EQ(raw.n_exceed, plus.n_exceed);
    }
}

TEST(PValueProperties, ValidUnderNullModelDraws) {
    // The observed graph is itself a uniform draw from the permutation class of
    // a base graph, so P(p <= alpha) <= alpha for each alpha.
    Rng rng(11);
    const auto base = spillover::testing::random_graph(24, 0.2, rng);
    const auto z = spillover::testing::mixed_assignment(24, rng);
    const auto y = spillover::testing::random_outcomes(24, rng);
    constexpr int kReps = 600;
    const double alphas[] = {0.01, 0.05, 0.1};
    int rejections[3] = {0, 0, 0};
    int defined = 0;
    for (int r = 0; r < kReps; ++r) {
        const auto g_obs = sample_degree_isomorphism(base, rng);
        if (!evaluate(kBond, g_obs, z.z, y)) continue;
        ++defined;
        auto sampler = make_sampler(NullClassMode::DegreeIsomorphism, g_obs, &z);
        const auto rep = pvalue_mc(g_obs, z, y, kBond, sampler, NullClassMode::DegreeIsomorphism, 200,
                                   Estimator::Raw, rng);
        for (int k = 0; k < 3; ++k) rejections[k] += rep.p_value <= alphas[k] ? 1 : 0;
    }
    ASSERT_GT(defined, kReps / 2);
    for (int k = 0; k < 3; ++k) {
        const double a = alphas[k];
        EXPECT_LE(double(rejections[k]) / defined, a + 3 * std::sqrt(a * (1 - a) / defined)) << "alpha " << a;
    }
}

TEST(Estimator, Names) {
    EXPECT_EQ(parse_estimator("raw"), Estimator::Raw);
    EXPECT_EQ(parse_estimator("plus-one"), Estimator::PlusOne);
    EXPECT_THROW(parse_estimator("laplace"), Error);
}
