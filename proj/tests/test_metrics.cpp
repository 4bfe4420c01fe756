// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "tsfp/metrics.hpp"
#include "tsfp/testing/oracles.hpp"

namespace {

using tsfp::MetricValue;
using tsfp::Tensor;
using tsfp::testing::random_tensor;
using DT = Tensor<double>;

DT one_hot(int n, int index) {
    std::vector<double> data(static_cast<std::size_t>(n), 0.0);
    data[static_cast<std::size_t>(index)] = 1.0;
    return DT::from({n}, std::move(data));
}

TEST(MetricNss, EqualsNegatedLossBitExactly) {
    tsfp::Rng rng(1);
    DT s = random_tensor<double>({4, 4}, rng, 0.0, 1.0);
    DT f = one_hot(16, 5);
    f = tsfp::ops::reshape(f, {4, 4});
    const double loss = tsfp::loss_nss(s, f).value.item();
    EXPECT_EQ(tsfp::metric_nss(s, f).value, -loss);
}

TEST(MetricNss, TwoPixelCaseIsPlusOne) {
    DT s = DT::from({2}, {0.0, 1.0});
    DT f = DT::from({2}, {0.0, 1.0});
    EXPECT_NEAR(tsfp::metric_nss(s, f).value, 1.0, 1e-12);
}

TEST(MetricNss, AllPixelsFixatedIsZero) {
    tsfp::Rng rng(2);
    DT s = random_tensor<double>({3, 3}, rng);
    EXPECT_NEAR(tsfp::metric_nss(s, DT::filled({3, 3}, 1.0)).value, 0.0, 1e-12);
}

TEST(MetricCc, EqualsNegatedLossAndPerfectScore) {
    DT g = DT::from({4}, {0.1, 0.4, 0.2, 0.3});
    EXPECT_EQ(tsfp::metric_cc(g, g).value, -tsfp::loss_cc(g, g).value.item());
    EXPECT_NEAR(tsfp::metric_cc(g, g).value, 1.0, 1e-12);
}

TEST(MetricCc, AntiCorrelatedIsMinusOne) {
    DT s = DT::from({4}, {0.1, 0.3, 0.2, 0.4});
    DT g = DT::from({4}, {0.4, 0.2, 0.3, 0.1});
    EXPECT_NEAR(tsfp::metric_cc(s, g).value, -1.0, 1e-12);
}

TEST(MetricSim, IdenticalMapsScoreOne) {
    tsfp::Rng rng(3);
    DT g = random_tensor<double>({4, 4}, rng, 0.1, 1.0);
    EXPECT_NEAR(tsfp::metric_sim(g, g), 1.0, 1e-12);
}

TEST(MetricSim, DisjointSupportsScoreZero) {
    EXPECT_DOUBLE_EQ(tsfp::metric_sim(one_hot(4, 0), one_hot(4, 3)), 0.0);
}

TEST(MetricSim, HandComputedOverlap) {
    DT s = DT::from({2}, {0.5, 0.5});
    DT g = DT::from({2}, {0.25, 0.75});
    EXPECT_NEAR(tsfp::metric_sim(s, g), 0.75, 1e-12);
}

TEST(MetricSim, ZeroSumMapIsAnError) {
    EXPECT_THROW(tsfp::metric_sim(DT::zeros({4}), one_hot(4, 0)), std::invalid_argument);
}

TEST(MetricSim, MatchesOracleOnRandomMaps) {
    tsfp::Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        DT s = random_tensor<double>({3, 4}, rng, 0.0, 1.0);
        DT g = random_tensor<double>({3, 4}, rng, 0.0, 1.0);
        EXPECT_NEAR(tsfp::metric_sim(s, g),
                    tsfp::testing::sim_oracle({s.data().data(), s.data().size()},
                                              {g.data().data(), g.data().size()}),
                    1e-12);
    }
}

TEST(MetricAucJudd, PerfectSeparationScoresOne) {
    DT s = DT::from({2, 3}, {0.9, 0.8, 0.1, 0.2, 0.3, 0.05});
    DT f = DT::from({2, 3}, {1.0, 1.0, 0.0, 0.0, 0.0, 0.0});
    EXPECT_DOUBLE_EQ(tsfp::metric_auc_judd(s, f).value, 1.0);
}

TEST(MetricAucJudd, ConstantMapScoresHalf) {
    DT s = DT::filled({4, 4}, 0.5);
    DT f = one_hot(16, 3);
    f = tsfp::ops::reshape(f, {4, 4});
    const MetricValue v = tsfp::metric_auc_judd(s, f);
    EXPECT_DOUBLE_EQ(v.value, 0.5);
    EXPECT_FALSE(v.degenerate);
}

TEST(MetricAucJudd, NoFixationsIsAnError) {
    EXPECT_THROW(tsfp::metric_auc_judd(DT::filled({4}, 0.5), DT::zeros({4})),
                 std::invalid_argument);
}

TEST(MetricAucJudd, AllPixelsFixatedIsDegenerate) {
    const MetricValue v = tsfp::metric_auc_judd(DT::filled({4}, 0.5), DT::filled({4}, 1.0));
    EXPECT_TRUE(v.degenerate);
    EXPECT_DOUBLE_EQ(v.value, 0.5);
}

TEST(MetricAucJudd, MatchesExhaustiveSweepOracle) {
    tsfp::Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        // Quantized values force threshold ties; a few fixations per map.
        std::vector<double> sal(16);
        for (auto& v : sal) v = 0.1 * static_cast<double>(rng.uniform_int(0, 9));
        std::vector<double> fix(16, 0.0);
        const int n_fix = static_cast<int>(rng.uniform_int(1, 5));
        for (int k = 0; k < n_fix; ++k) fix[static_cast<std::size_t>(rng.uniform_int(0, 15))] = 1.0;

        DT s = DT::from({4, 4}, std::vector<double>(sal));
        DT f = DT::from({4, 4}, std::vector<double>(fix));
        const MetricValue got = tsfp::metric_auc_judd(s, f);

        std::vector<std::uint8_t> pos(16), neg(16);
        for (int i = 0; i < 16; ++i) {
            pos[i] = fix[i] != 0.0;
            neg[i] = !pos[i];
        }
        const double want = tsfp::testing::auc_sweep_oracle(sal, pos, neg);
        EXPECT_NEAR(got.value, want, 1e-9);
    }
}

TEST(MetricSauc, ExtremesScoreOne) {
    DT s = DT::from({4}, {0.9, 0.1, 0.5, 0.2});
    DT f = one_hot(4, 0);
    DT neg = one_hot(4, 1);
    EXPECT_DOUBLE_EQ(tsfp::metric_sauc(s, f, neg).value, 1.0);
}

TEST(MetricSauc, ConstantMapScoresHalf) {
    DT s = DT::filled({4}, 0.3);
    EXPECT_DOUBLE_EQ(tsfp::metric_sauc(s, one_hot(4, 0), one_hot(4, 2)).value, 0.5);
}

TEST(MetricSauc, EmptyNegativeSetIsAnError) {
    DT s = DT::from({4}, {0.9, 0.1, 0.5, 0.2});
    EXPECT_THROW(tsfp::metric_sauc(s, one_hot(4, 0), DT::zeros({4})), std::invalid_argument);
}

TEST(MetricSauc, MatchesExhaustiveSweepOracle) {
    tsfp::Rng rng(6);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> sal(12);
        for (auto& v : sal) v = 0.25 * static_cast<double>(rng.uniform_int(0, 4));
        std::vector<double> fix(12, 0.0), negs(12, 0.0);
        fix[static_cast<std::size_t>(rng.uniform_int(0, 11))] = 1.0;
        fix[static_cast<std::size_t>(rng.uniform_int(0, 11))] = 1.0;
        negs[static_cast<std::size_t>(rng.uniform_int(0, 11))] = 1.0;
        negs[static_cast<std::size_t>(rng.uniform_int(0, 11))] = 1.0;
        negs[static_cast<std::size_t>(rng.uniform_int(0, 11))] = 1.0;

        DT s = DT::from({3, 4}, std::vector<double>(sal));
        DT f = DT::from({3, 4}, std::vector<double>(fix));
        DT n = DT::from({3, 4}, std::vector<double>(negs));
        std::vector<std::uint8_t> pos_mask(12), neg_mask(12);
        for (int i = 0; i < 12; ++i) {
            pos_mask[i] = fix[i] != 0.0;
            neg_mask[i] = negs[i] != 0.0;
        }
        EXPECT_NEAR(tsfp::metric_sauc(s, f, n).value,
                    tsfp::testing::auc_sweep_oracle(sal, pos_mask, neg_mask), 1e-9);
    }
}

TEST(MetricInvariance, PositiveAffineTransforms) {
    tsfp::Rng rng(7);
    DT s = random_tensor<double>({4, 4}, rng, 0.0, 1.0);
    std::vector<double> fix(16, 0.0);
    fix[2] = fix[9] = 1.0;
    DT f = DT::from({4, 4}, std::vector<double>(fix));
    std::vector<double> negs(16, 0.0);
    negs[1] = negs[14] = 1.0;
    DT neg = DT::from({4, 4}, std::move(negs));
    DT g = random_tensor<double>({4, 4}, rng, 0.1, 1.0);

    std::vector<double> t;
    for (double v : s.data()) t.push_back(1.75 * v + 0.3);
    DT s2 = DT::from(s.shape(), std::move(t));

    EXPECT_NEAR(tsfp::metric_nss(s, f).value, tsfp::metric_nss(s2, f).value, 1e-12);
    EXPECT_NEAR(tsfp::metric_cc(s, g).value, tsfp::metric_cc(s2, g).value, 1e-12);
    // Rank-based metrics are exactly invariant.
    EXPECT_DOUBLE_EQ(tsfp::metric_auc_judd(s, f).value, tsfp::metric_auc_judd(s2, f).value);
    EXPECT_DOUBLE_EQ(tsfp::metric_sauc(s, f, neg).value, tsfp::metric_sauc(s2, f, neg).value);

    // SIM is invariant under pure scaling but not under shifts.
    std::vector<double> scaled, shifted;
    for (double v : s.data()) scaled.push_back(3.0 * v);
    for (double v : s.data()) shifted.push_back(v + 1.0);
    EXPECT_NEAR(tsfp::metric_sim(s, g), tsfp::metric_sim(DT::from(s.shape(), std::move(scaled)), g),
                1e-12);
    EXPECT_NE(tsfp::metric_sim(s, g), tsfp::metric_sim(DT::from(s.shape(), std::move(shifted)), g));
}

TEST(Aggregate, SingleRecordIsItself) {
    tsfp::FrameEval f;
    f.video = "v01";
    f.frame = 1;
    f.nss = {1.5, false};
    f.cc = {0.5, false};
    f.sim = {0.25, false};
    f.auc_j = {0.9, false};
    f.s_auc = {0.8, false};
    const auto agg = tsfp::aggregate_frames({f});
    EXPECT_DOUBLE_EQ(agg.nss.mean, 1.5);
    EXPECT_DOUBLE_EQ(agg.s_auc.mean, 0.8);
    EXPECT_EQ(agg.nss.excluded, 0);
}

TEST(Aggregate, VideoMeansIgnoreFrameCounts) {
    // Video A: 3 frames of 0.4. Video B: 1 frame of 0.6. Dataset mean 0.5.
    std::vector<tsfp::FrameEval> a(3), b(1);
    for (auto& f : a) f.nss = {0.4, false};
    for (auto& f : b) f.nss = {0.6, false};
    const auto agg =
        tsfp::aggregate_videos({tsfp::aggregate_frames(a), tsfp::aggregate_frames(b)});
    EXPECT_DOUBLE_EQ(agg.nss.mean, 0.5);
}

TEST(Aggregate, DegenerateFramesAreExcludedAndCounted) {
    std::vector<tsfp::FrameEval> frames(3);
    frames[0].nss = {1.0, false};
    frames[1].nss = {0.0, true};  // flagged, must not pull the mean down
    frames[2].nss = {2.0, false};
    const auto agg = tsfp::aggregate_frames(frames);
    EXPECT_DOUBLE_EQ(agg.nss.mean, 1.5);
    EXPECT_EQ(agg.nss.used, 2);
    EXPECT_EQ(agg.nss.excluded, 1);
}

TEST(Report, StableLineOrientedFormat) {
    std::vector<tsfp::FrameEval> frames(2);
    frames[0].video = "v01";
    frames[0].frame = 1;
    frames[0].nss = {1.0, false};
    frames[0].cc = {0.5, false};
    frames[0].sim = {0.25, false};
    frames[0].auc_j = {0.75, false};
    frames[0].s_auc = {0.0, true};
    frames[1].video = "v02";
    frames[1].frame = 1;
    frames[1].nss = {2.0, false};
    frames[1].cc = {0.7, false};
    frames[1].sim = {0.5, false};
    frames[1].auc_j = {0.8, false};
    frames[1].s_auc = {0.6, false};

    const std::string report = tsfp::format_report(frames);
    EXPECT_NE(report.find("video,frame,nss,cc,sim,aucj,sauc\n"), std::string::npos);
    EXPECT_NE(report.find("v01,1,1.000000,0.500000,0.250000,0.750000,nan\n"), std::string::npos);
    EXPECT_NE(report.find("agg,v01,"), std::string::npos);
    EXPECT_NE(report.find("agg,all,1.500000,"), std::string::npos);
    EXPECT_NE(report.find("excluded,all,0,0,0,0,1\n"), std::string::npos);
    EXPECT_EQ(report, tsfp::format_report(frames));
}

}  // namespace
