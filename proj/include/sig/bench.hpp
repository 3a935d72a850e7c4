#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "sig/config.hpp"
#include "sig/io.hpp"
#include "sig/mlsm.hpp"
#include "sig/srd.hpp"
#include "sig/srg.hpp"
#include "sig/synthetic.hpp"

namespace sig {

struct BenchOptions {
    std::vector<int> counts = {3, 5, 7, 9, 11, 13, 15, 17, 19, 22};
    int reps = 1000;
    std::uint64_t seed = 42;
};

struct BenchRow {
    int count = 0;
    double mlsm_seconds = 0.0;
    double srgs_seconds = 0.0;
    double srd_seconds = 0.0;
};

namespace detail {

template <typename T>
inline void keep_alive(const T& value) {
    asm volatile("" : : "g"(&value) : "memory");
}

}  // namespace detail

/// Time MLSM, SRGS and SRD on synthetic scene pairs at each object count.
/// Scene generation and alignment run outside the timed loops. SRD is
/// timed on one preposition slot per object (directional plus proximal),
/// matching its per-slot linear cost.
inline std::vector<BenchRow> run_bench(const BenchOptions& opt, const EvalConfig& cfg) {
    std::mt19937_64 rng(opt.seed);
    std::vector<BenchRow> rows;
    rows.reserve(opt.counts.size());

    for (int count : opt.counts) {
        if (count < 1) fail(errc::config_error, "bench object counts must be at least 1");
        BenchRow row;
        row.count = count;

        constexpr int kPairPool = 16;
        struct ScenePair {
            SigScene gt, pred_aligned;
        };
        std::vector<ScenePair> pairs;
        pairs.reserve(kPairPool);
        for (int i = 0; i < kPairPool; ++i) {
            SigScene gt = random_vehicle_scene(rng, count);
            SigScene pred = perturb_scene(rng, gt);
            pairs.push_back({gt, align_ego(pred, gt)});
        }

        std::uniform_int_distribution<int> dir(0, 7);
        std::uniform_int_distribution<int> prox(0, 4);
        std::vector<int> dir_gt(count), dir_pred(count), prox_gt(count), prox_pred(count);
        for (int i = 0; i < count; ++i) {
            dir_gt[i] = dir(rng);
            dir_pred[i] = dir(rng);
            prox_gt[i] = prox(rng);
            prox_pred[i] = prox(rng);
        }

        using clock = std::chrono::steady_clock;
        const int reps = opt.reps;

        // Warmup pass so first-touch costs stay out of the measurement.
        for (const ScenePair& p : pairs) {
            detail::keep_alive(mlsm_scores(p.pred_aligned, p.gt, cfg.mlsm, cfg.match_weights, cfg.ontology));
            detail::keep_alive(srgs(p.pred_aligned, p.gt, cfg.ged, cfg.match_weights, cfg.ontology));
        }

        // Each metric is timed over `reps` calls. The block is repeated
        // until roughly the same wall-time budget has been spent at every
        // object count, and the fastest block mean is kept: noise from
        // scheduling and frequency scaling is strictly additive, so the
        // minimum is the best estimate of the intrinsic per-frame cost.
        auto timed_min = [&](auto&& body) {
            auto run_block = [&]() {
                const auto t0 = clock::now();
                for (int r = 0; r < reps; ++r) body(r);
                const auto t1 = clock::now();
                return std::chrono::duration<double>(t1 - t0).count() / reps;
            };
            double best = run_block();
            const double block_seconds = std::max(best * reps, 1e-9);
            const int blocks = std::clamp(static_cast<int>(std::ceil(0.15 / block_seconds)), 2, 96);
            for (int block = 0; block < blocks; ++block) best = std::min(best, run_block());
            return best;
        };

        row.mlsm_seconds = timed_min([&](int r) {
            const ScenePair& p = pairs[static_cast<size_t>(r) % kPairPool];
            detail::keep_alive(mlsm_scores(p.pred_aligned, p.gt, cfg.mlsm, cfg.match_weights, cfg.ontology));
        });
        row.srgs_seconds = timed_min([&](int r) {
            const ScenePair& p = pairs[static_cast<size_t>(r) % kPairPool];
            detail::keep_alive(srgs(p.pred_aligned, p.gt, cfg.ged, cfg.match_weights, cfg.ontology));
        });
        row.srd_seconds = timed_min([&](int r) {
            (void)r;
            detail::keep_alive(srd_scores(dir_pred, dir_gt, RelationScale::directional));
            detail::keep_alive(srd_scores(prox_pred, prox_gt, RelationScale::proximal));
        });

        rows.push_back(row);
    }
    return rows;
}

/// Least-squares slope of log(time) against log(count).
inline double loglog_slope(const std::vector<BenchRow>& rows, double BenchRow::*field) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const BenchRow& r : rows) {
        const double t = r.*field;
        if (t <= 0.0) continue;
        const double x = std::log(static_cast<double>(r.count));
        const double y = std::log(t);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::string bench_table(const std::vector<BenchRow>& rows) {
    std::string out = "metric";
    for (const BenchRow& r : rows) out += "\t" + std::to_string(r.count);
    out += "\nMLSM [s]";
    for (const BenchRow& r : rows) out += "\t" + format_double(r.mlsm_seconds);
    out += "\nSRGS [s]";
    for (const BenchRow& r : rows) out += "\t" + format_double(r.srgs_seconds);
    out += "\nSRD [s]";
    for (const BenchRow& r : rows) out += "\t" + format_double(r.srd_seconds);
    out += "\n";
    return out;
}

inline nlohmann::ordered_json bench_json(const std::vector<BenchRow>& rows) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const BenchRow& r : rows)
        j.push_back({{"objects", r.count},
                     {"mlsm_seconds", r.mlsm_seconds},
                     {"srgs_seconds", r.srgs_seconds},
                     {"srd_seconds", r.srd_seconds}});
    return j;
}

}  // namespace sig
