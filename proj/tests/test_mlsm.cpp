#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "sig/mlsm.hpp"
#include "sig/synthetic.hpp"

using namespace sig;

namespace {

SigScene shifted(const SigScene& scene, double dx, double dy) {
    return translate_scene(scene, {dx, dy});
}

}  // namespace

TEST_CASE("identical scenes score perfectly at every level and threshold") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const SigScene scene = random_scene(rng, trial % 10);
        const MlsmReport report = mlsm_scores(scene, scene, MlsmConfig{}, MatchWeights{});
        CHECK(report.precision == 1.0);
        CHECK(report.recall == 1.0);
        CHECK(report.f1 == 1.0);
        CHECK(report.assa == 1.0);
        for (const CategoryReport& cat : report.categories)
            for (const LevelReport& level : cat.levels)
                for (const ThresholdScores& t : level.per_threshold) {
                    CHECK(t.precision == 1.0);
                    CHECK(t.recall == 1.0);
                    CHECK(t.assa == 1.0);
                    CHECK(t.counts.fp == 0);
                    CHECK(t.counts.fn == 0);
                }
    }
}

TEST_CASE("empty prediction against nonempty GT zeroes the scores") {
    const SigScene gt = parse_sig(
        R"({"vehicles":{"black car 1":[2,2],"white car 2":[5,5]},"self":[4,0]})");
    const SigScene pred = parse_sig(R"({"vehicles":{},"self":[4,0]})");
    const MlsmReport report = mlsm_scores(pred, gt, MlsmConfig{}, MatchWeights{});
    CHECK(report.precision == 0.0);
    CHECK(report.recall == 0.0);
    CHECK(report.f1 == 0.0);
    CHECK(report.assa == 0.0);
}

TEST_CASE("both-empty categories count as perfect") {
    const SigScene empty = parse_sig(R"({"self":[4,0]})");
    const MlsmReport report = mlsm_scores(empty, empty, MlsmConfig{}, MatchWeights{});
    CHECK(report.precision == 1.0);
    CHECK(report.recall == 1.0);
    CHECK(report.f1 == 1.0);
    CHECK(report.assa == 1.0);
}

TEST_CASE("threshold exclusion turns a pair into FN plus FP") {
    // One vehicle displaced by (1, 1): distance sqrt(2) > 1, <= 2.
    const SigScene gt = parse_sig(R"({"vehicles":{"black car 1":[2,2]},"self":[4,0]})");
    const SigScene pred = parse_sig(R"({"vehicles":{"black car 1":[3,3]},"self":[4,0]})");
    const SceneMatch match = match_scene(pred, gt, MatchWeights{});
    const MatchCounts tight = classify_pairs(match.categories[0], kVehicleLevels[0], 1.0);
    CHECK(tight.tp == 0);
    CHECK(tight.fp == 1);
    CHECK(tight.fn == 1);
    const MatchCounts loose = classify_pairs(match.categories[0], kVehicleLevels[0], 2.0);
    CHECK(loose.tp == 1);
    CHECK(loose.fp == 0);
    CHECK(loose.fn == 0);
}

TEST_CASE("attribute demands can reject a pair that passes the distance gate") {
    const SigScene gt = parse_sig(R"({"vehicles":{"black car 1":[2,2]},"self":[4,0]})");
    const SigScene pred = parse_sig(R"({"vehicles":{"black car 2":[2,3]},"self":[4,0]})");
    const SceneMatch match = match_scene(pred, gt, MatchWeights{});
    REQUIRE(match.categories[0].pairs.size() == 1);

    const MatchCounts kind_only = classify_pairs(match.categories[0], kVehicleLevels[0], 1.0);
    CHECK(kind_only.tp == 1);
    const MatchCounts kind_order = classify_pairs(match.categories[0], kVehicleLevels[1], 1.0);
    CHECK(kind_order.tp == 0);
    CHECK(kind_order.fn == 1);
    CHECK(kind_order.fp == 1);
}

TEST_CASE("counts satisfy the TP+FN / TP+FP identities") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const SigScene gt = random_scene(rng, 8);
        const SigScene pred = perturb_scene(rng, gt);
        const SceneMatch match = match_scene(align_ego(pred, gt), gt, MatchWeights{});
        for (int ci = 0; ci < 3; ++ci) {
            for (const LevelSpec& level : {kVehicleLevels[0], kVehicleLevels[2], kOrderOnlyLevel})
                for (double alpha : {1.0, 3.0, 5.0}) {
                    const MatchCounts c = classify_pairs(match.categories[ci], level, alpha);
                    CHECK(c.tp + c.fn == match.categories[ci].gt_count);
                    CHECK(c.tp + c.fp == match.categories[ci].pred_count);
                }
        }
    }
}

TEST_CASE("scores are non-decreasing in the threshold and level hierarchy holds") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 60; ++trial) {
        const SigScene gt = random_scene(rng, 9);
        const SigScene pred = perturb_scene(rng, gt);
        const MlsmReport report =
            mlsm_scores(align_ego(pred, gt), gt, MlsmConfig{}, MatchWeights{});
        for (const CategoryReport& cat : report.categories) {
            for (const LevelReport& level : cat.levels)
                for (size_t t = 1; t < level.per_threshold.size(); ++t) {
                    CHECK(level.per_threshold[t].precision >= level.per_threshold[t - 1].precision);
                    CHECK(level.per_threshold[t].recall >= level.per_threshold[t - 1].recall);
                }
            if (cat.levels.size() == 3) {
                for (size_t t = 0; t < cat.levels[0].per_threshold.size(); ++t) {
                    const int tp1 = cat.levels[0].per_threshold[t].counts.tp;
                    const int tp2 = cat.levels[1].per_threshold[t].counts.tp;
                    const int tp3 = cat.levels[2].per_threshold[t].counts.tp;
                    CHECK(tp3 <= tp2);
                    CHECK(tp2 <= tp1);
                }
            }
        }
    }
}

TEST_CASE("translating both scenes together changes nothing") {
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 30; ++trial) {
        const SigScene gt = random_scene(rng, 7);
        const SigScene pred = perturb_scene(rng, gt);
        const MlsmReport base = mlsm_scores(align_ego(pred, gt), gt, MlsmConfig{}, MatchWeights{});
        const MlsmReport moved = mlsm_scores(align_ego(shifted(pred, 3, -2), shifted(gt, 3, -2)),
                                             shifted(gt, 3, -2), MlsmConfig{}, MatchWeights{});
        CHECK(base.precision == moved.precision);
        CHECK(base.recall == moved.recall);
        CHECK(base.f1 == moved.f1);
        CHECK(base.assa == moved.assa);
    }
}

TEST_CASE("report matches the naive per-level enumeration") {
    std::mt19937_64 rng(46);
    const MlsmConfig cfg;
    for (int trial = 0; trial < 40; ++trial) {
        const SigScene gt = random_scene(rng, 6);
        const SigScene pred = perturb_scene(rng, gt);
        const SigScene aligned = align_ego(pred, gt);
        const SceneMatch match = match_scene(aligned, gt, MatchWeights{});
        const MlsmReport report = mlsm_scores(aligned, gt, cfg, MatchWeights{});

        for (int ci = 0; ci < 3; ++ci) {
            const CategoryReport& cat = report.categories[ci];
            if (ci == 0) {
                const bool flags[3][3] = {{true, false, false}, {true, true, false}, {true, true, true}};
                for (int lv = 0; lv < 3; ++lv) {
                    const sig_test::NaiveMlsm naive = sig_test::naive_category_level(
                        match.categories[ci], flags[lv][0], flags[lv][1], flags[lv][2],
                        cfg.thresholds);
                    CHECK(cat.levels[lv].precision == doctest::Approx(naive.p).epsilon(1e-12));
                    CHECK(cat.levels[lv].recall == doctest::Approx(naive.r).epsilon(1e-12));
                    CHECK(cat.levels[lv].f1 == doctest::Approx(naive.f1).epsilon(1e-12));
                    CHECK(cat.levels[lv].assa == doctest::Approx(naive.assa).epsilon(1e-12));
                }
            } else {
                const sig_test::NaiveMlsm naive = sig_test::naive_category_level(
                    match.categories[ci], false, true, false, cfg.thresholds);
                CHECK(cat.levels[0].precision == doctest::Approx(naive.p).epsilon(1e-12));
                CHECK(cat.levels[0].recall == doctest::Approx(naive.r).epsilon(1e-12));
                CHECK(cat.levels[0].assa == doctest::Approx(naive.assa).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("overall scalars match a fully independent recomputation") {
    // The reference builds its own cost matrices, matches with the
    // exhaustive oracle, counts from scratch and aggregates per the
    // documented rules; only the final four scalars are compared.
    std::mt19937_64 rng(47);
    const MlsmConfig cfg;
    std::uniform_int_distribution<int> size(1, 7);
    int done = 0;
    while (done < 40) {
        const SigScene gt = random_scene(rng, size(rng));
        if (gt.object_count() == 0) continue;
        ++done;
        const SigScene pred = perturb_scene(rng, gt);
        const SigScene aligned = align_ego(pred, gt);
        const MlsmReport report = mlsm_scores(aligned, gt, cfg, MatchWeights{});
        const sig_test::NaiveMlsmOverall naive =
            sig_test::naive_mlsm_overall(aligned, gt, MatchWeights{}, cfg.thresholds);
        CHECK(report.precision == doctest::Approx(naive.p).epsilon(1e-12));
        CHECK(report.recall == doctest::Approx(naive.r).epsilon(1e-12));
        CHECK(report.f1 == doctest::Approx(naive.f1).epsilon(1e-12));
        CHECK(report.assa == doctest::Approx(naive.assa).epsilon(1e-12));
    }
}

TEST_CASE("custom thresholds drive the sweep") {
    // Pair at distance 2: a single tight threshold rejects it entirely.
    const SigScene gt = parse_sig(R"({"vehicles":{"black car 1":[2,2]},"self":[4,0]})");
    const SigScene pred = parse_sig(R"({"vehicles":{"black car 1":[2,4]},"self":[4,0]})");
    MlsmConfig cfg;
    cfg.thresholds = {0.5};
    const MlsmReport tight = mlsm_scores(pred, gt, cfg, MatchWeights{});
    CHECK(tight.recall == 0.0);
    cfg.thresholds = {2.0, 4.0};
    const MlsmReport loose = mlsm_scores(pred, gt, cfg, MatchWeights{});
    CHECK(loose.recall == 1.0);
}

TEST_CASE("displaced-vehicle example agrees with hand-computed values") {
    // Three same-attribute matches, one displaced by 2.2 cells.
    const SigScene gt = parse_sig(
        R"({"vehicles":{"black car 1":[1,1],"white car 2":[4,4],"blue van 3":[8,2]},"self":[4,0]})");
    SigScene pred = gt;
    pred.categories[0][1].pos = {4.0, 6.2};

    const MlsmReport report = mlsm_scores(pred, gt, MlsmConfig{}, MatchWeights{});
    // alpha in {1,2}: TP=2 of 3 -> P=R=2/3, AssA=2/4. alpha in {3,4,5}: all pass.
    const double p = (2.0 / 3 + 2.0 / 3 + 1 + 1 + 1) / 5;
    const double assa = (0.5 + 0.5 + 1 + 1 + 1) / 5;
    for (const LevelReport& level : report.categories[0].levels) {
        CHECK(level.precision == doctest::Approx(p).epsilon(1e-12));
        CHECK(level.recall == doctest::Approx(p).epsilon(1e-12));
        CHECK(level.assa == doctest::Approx(assa).epsilon(1e-12));
    }
    CHECK(report.precision == doctest::Approx(p).epsilon(1e-12));
    CHECK(report.f1 == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("gt-weighted aggregation folds categories by object count") {
    // 2 vehicles scored perfectly, 1 sign completely missed.
    const SigScene gt = parse_sig(
        R"({"vehicles":{"black car 1":[1,1],"white car 2":[4,4]},"traffic_signs":{"sign 1":[9,9]},"self":[4,0]})");
    const SigScene pred = parse_sig(
        R"({"vehicles":{"black car 1":[1,1],"white car 2":[4,4]},"traffic_signs":{},"self":[4,0]})");
    MlsmConfig cfg;
    const MlsmReport weighted = mlsm_scores(pred, gt, cfg, MatchWeights{});
    CHECK(weighted.recall == doctest::Approx(2.0 / 3).epsilon(1e-12));

    cfg.aggregation = MlsmConfig::Aggregation::uniform;
    const MlsmReport uniform = mlsm_scores(pred, gt, cfg, MatchWeights{});
    CHECK(uniform.recall == doctest::Approx(0.5).epsilon(1e-12));
}
