#pragma once

#include <string>
#include <vector>

#include "sig/matching.hpp"

namespace sig {

/// Attribute demands of one matching level. A matched pair only counts as
/// a true positive when every demanded attribute agrees.
struct LevelSpec {
    const char* name = "order";
    bool kind = false;
    bool order = false;
    bool color = false;
};

inline constexpr LevelSpec kVehicleLevels[3] = {
    {"kind", true, false, false},
    {"kind+order", true, true, false},
    {"kind+order+color", true, true, true},
};
inline constexpr LevelSpec kOrderOnlyLevel = {"order", false, true, false};

struct MlsmConfig {
    std::vector<double> thresholds = {1.0, 2.0, 3.0, 4.0, 5.0};
    enum class Aggregation { gt_weighted, uniform };
    Aggregation aggregation = Aggregation::gt_weighted;
};

struct MatchCounts {
    int tp = 0;
    int fp = 0;
    int fn = 0;
};

/// Count TP/FP/FN of one category matching at a given level and distance
/// threshold. A matched pair is a true positive when its grid distance is
/// within alpha and the level's attributes agree; otherwise its GT side
/// counts as a miss and its predicted side as a false alarm, exactly like
/// the unmatched objects.
inline MatchCounts classify_pairs(const CategoryMatch& match, const LevelSpec& level, double alpha) {
    MatchCounts counts;
    for (const PairObs& p : match.pairs) {
        const bool attrs_ok = (!level.kind || p.kind_match) && (!level.order || p.order_match) &&
                              (!level.color || p.color_match);
        if (p.dist <= alpha && attrs_ok) {
            ++counts.tp;
        } else {
            ++counts.fn;
            ++counts.fp;
        }
    }
    counts.fn += static_cast<int>(match.unmatched_gt.size());
    counts.fp += static_cast<int>(match.unmatched_pred.size());
    return counts;
}

struct ThresholdScores {
    double alpha = 0.0;
    MatchCounts counts;
    double precision = 0.0;
    double recall = 0.0;
    double assa = 0.0;
};

struct LevelReport {
    std::string level;
    std::vector<ThresholdScores> per_threshold;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double assa = 0.0;
};

struct CategoryReport {
    std::string category;
    int gt_count = 0;
    int pred_count = 0;
    std::vector<LevelReport> levels;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double assa = 0.0;
};

struct MlsmReport {
    std::vector<CategoryReport> categories;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double assa = 0.0;
};

namespace detail {

// 0/0 ratios resolve to 0 except when the category is empty on both
// sides, which counts as a perfect prediction.
inline double safe_ratio(int num, int den, bool both_empty) {
    if (den > 0) return static_cast<double>(num) / static_cast<double>(den);
    return both_empty ? 1.0 : 0.0;
}

inline double f1_of(double p, double r) {
    const double den = p + r;
    return den > 0.0 ? 2.0 * p * r / den : 0.0;
}

inline LevelReport score_level(const CategoryMatch& match, const LevelSpec& level,
                               const std::vector<double>& thresholds) {
    const bool both_empty = match.gt_count == 0 && match.pred_count == 0;
    LevelReport report;
    report.level = level.name;
    report.per_threshold.reserve(thresholds.size());
    double p_sum = 0.0, r_sum = 0.0, assa_sum = 0.0;
    for (double alpha : thresholds) {
        ThresholdScores t;
        t.alpha = alpha;
        t.counts = classify_pairs(match, level, alpha);
        t.precision = safe_ratio(t.counts.tp, t.counts.tp + t.counts.fp, both_empty);
        t.recall = safe_ratio(t.counts.tp, t.counts.tp + t.counts.fn, both_empty);
        t.assa = safe_ratio(t.counts.tp, t.counts.tp + t.counts.fp + t.counts.fn, both_empty);
        p_sum += t.precision;
        r_sum += t.recall;
        assa_sum += t.assa;
        report.per_threshold.push_back(t);
    }
    const double n = static_cast<double>(thresholds.size());
    report.precision = p_sum / n;
    report.recall = r_sum / n;
    report.f1 = f1_of(report.precision, report.recall);
    report.assa = assa_sum / n;
    return report;
}

}  // namespace detail

/// Multi-level spatial matching scores for one aligned scene pair. Runs
/// the threshold sweep per category and level, averages ratios over the
/// thresholds, forms F1 from the averaged precision/recall, then folds
/// levels (uniform) and categories (GT-count weighted by default) into
/// the overall scalars.
inline MlsmReport mlsm_scores(const SigScene& pred, const SigScene& gt, const MlsmConfig& cfg,
                              const MatchWeights& w, const Ontology& ont = Ontology::standard()) {
    const SceneMatch match = match_scene(pred, gt, w, ont);

    MlsmReport report;
    for (size_t mi = 0; mi < match.categories.size(); ++mi) {
        const bool is_lanes = match.lanes_included && mi + 1 == match.categories.size();
        if (!is_lanes && !ont.categories[mi].in_metrics) continue;
        const CategoryMatch& cm = match.categories[mi];

        CategoryReport cat;
        cat.category = is_lanes ? "lanes" : ont.categories[mi].name;
        cat.gt_count = cm.gt_count;
        cat.pred_count = cm.pred_count;

        const bool full = !is_lanes && ont.categories[mi].schema == AttributeSchema::full;
        if (full) {
            for (const LevelSpec& level : kVehicleLevels)
                cat.levels.push_back(detail::score_level(cm, level, cfg.thresholds));
        } else {
            cat.levels.push_back(detail::score_level(cm, kOrderOnlyLevel, cfg.thresholds));
        }

        double p = 0.0, r = 0.0, f1 = 0.0, assa = 0.0;
        for (const LevelReport& lv : cat.levels) {
            p += lv.precision;
            r += lv.recall;
            f1 += lv.f1;
            assa += lv.assa;
        }
        const double nl = static_cast<double>(cat.levels.size());
        cat.precision = p / nl;
        cat.recall = r / nl;
        cat.f1 = f1 / nl;
        cat.assa = assa / nl;
        report.categories.push_back(std::move(cat));
    }

    // Overall aggregation across categories; F1 folds like the other
    // ratios, having been formed from averaged P and R per level.
    double weight_sum = 0.0;
    double p = 0.0, r = 0.0, f1 = 0.0, assa = 0.0;
    auto accumulate = [&](const CategoryReport& cat, double weight) {
        weight_sum += weight;
        p += weight * cat.precision;
        r += weight * cat.recall;
        f1 += weight * cat.f1;
        assa += weight * cat.assa;
    };
    if (cfg.aggregation == MlsmConfig::Aggregation::gt_weighted) {
        for (const CategoryReport& cat : report.categories)
            if (cat.gt_count > 0) accumulate(cat, static_cast<double>(cat.gt_count));
        if (weight_sum == 0.0) {
            // No GT objects anywhere: fall back to the predicted side so
            // spurious predictions still register, else a perfect empty match.
            for (const CategoryReport& cat : report.categories)
                if (cat.pred_count > 0) accumulate(cat, 1.0);
        }
    } else {
        for (const CategoryReport& cat : report.categories)
            if (cat.gt_count > 0 || cat.pred_count > 0) accumulate(cat, 1.0);
    }
    if (weight_sum == 0.0) {
        report.precision = report.recall = report.f1 = report.assa = 1.0;
    } else {
        report.precision = p / weight_sum;
        report.recall = r / weight_sum;
        report.f1 = f1 / weight_sum;
        report.assa = assa / weight_sum;
    }
    return report;
}

}  // namespace sig
