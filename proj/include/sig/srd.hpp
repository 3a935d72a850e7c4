#pragma once

#include <array>
#include <cstdlib>
#include <span>
#include <string>
#include <vector>

#include "sig/error.hpp"
#include "sig/matching.hpp"
#include "sig/scene.hpp"

namespace sig {

inline constexpr int kProximalBinsCount = 5;

inline constexpr std::array<std::string_view, kProximalBinsCount> kProximalLabels = {
    "adjacent to", "close to", "at a distance", "far from", "far away from"};

/// Step distance between two directional prepositions on the 8-way
/// circle: the smaller of the two arc lengths.
inline int directional_distance(int a, int b) {
    if (a < 0 || a >= kDirectionBins || b < 0 || b >= kDirectionBins)
        fail(errc::index_out_of_range, "directional label index outside [0, 7]");
    const int diff = std::abs(a - b);
    return std::min(diff, kDirectionBins - diff);
}

/// Step distance between two proximal prepositions on the linear
/// closest-to-furthest scale.
inline int proximal_distance(int a, int b) {
    if (a < 0 || a >= kProximalBinsCount || b < 0 || b >= kProximalBinsCount)
        fail(errc::index_out_of_range, "proximal label index outside [0, 4]");
    return std::abs(a - b);
}

/// Grid-distance brackets mapping a pair's Euclidean separation to a
/// proximal label: [0, e0) adjacent, [e0, e1) close, and so on.
struct ProximalBins {
    std::array<double, kProximalBinsCount - 1> edges = {1.5, 3.5, 5.5, 8.0};

    int bin(double dist) const {
        int b = 0;
        while (b < kProximalBinsCount - 1 && dist >= edges[b]) ++b;
        return b;
    }
};

struct SrdScores {
    double mae = 0.0;
    double mse = 0.0;
    double acc = 1.0;  // empty slates count as perfect
    int slots = 0;
};

enum class RelationScale { directional, proximal };

inline int relation_distance(RelationScale scale, int a, int b) {
    return scale == RelationScale::directional ? directional_distance(a, b) : proximal_distance(a, b);
}

/// MAE / MSE / accuracy of predicted preposition indices against ground
/// truth. With weights each step distance is scaled by its weight before
/// entering MAE and MSE; accuracy ignores weights.
inline SrdScores srd_scores(std::span<const int> pred, std::span<const int> gt, RelationScale scale,
                            std::span<const double> weights = {}) {
    if (pred.size() != gt.size())
        fail(errc::length_mismatch, "predicted and GT label lists differ in length");
    if (!weights.empty() && weights.size() != gt.size())
        fail(errc::length_mismatch, "weight list does not cover every slot");

    SrdScores out;
    out.slots = static_cast<int>(gt.size());
    if (gt.empty()) return out;

    double abs_sum = 0.0, sq_sum = 0.0;
    int exact = 0;
    for (size_t i = 0; i < gt.size(); ++i) {
        const double d = relation_distance(scale, pred[i], gt[i]);
        const double scaled = weights.empty() ? d : weights[i] * d;
        abs_sum += scaled;
        sq_sum += scaled * scaled;
        if (d == 0.0) ++exact;
    }
    const double n = static_cast<double>(gt.size());
    out.mae = abs_sum / n;
    out.mse = sq_sum / n;
    out.acc = static_cast<double>(exact) / n;
    return out;
}

/// One template slot: the pair of objects whose relation is being asked.
/// Node indices refer to the canonical object order of the source scene.
struct SrpPair {
    std::string a;
    std::string b;
    int a_node = -1;
    int b_node = -1;
    bool degenerate_direction = false;  // coincident positions; no defined direction
};

struct SrpTemplate {
    std::vector<SrpPair> pairs;

    std::string paragraph(std::string_view placeholder) const {
        if (pairs.empty()) return ".";
        std::string out;
        for (const SrpPair& p : pairs) {
            out += p.a;
            out += " is [";
            out += placeholder;
            out += "] ";
            out += p.b;
            out += ". ";
        }
        out.pop_back();
        return out;
    }
    std::string directional_paragraph() const { return paragraph("directional preposition"); }
    std::string proximal_paragraph() const { return paragraph("proximal preposition"); }
};

/// A template plus its ground-truth labels.
struct SrpDerivation {
    SrpTemplate tmpl;
    std::vector<int> directional;
    std::vector<int> proximal;
};

/// Enumerate unordered object pairs in canonical order and read off the
/// ground-truth directional and proximal labels. Pair (A, B) is labelled
/// with the sector of pos_A - pos_B, so the sentence reads
/// "A is <label> B". Coincident pairs label direction 0 and carry a
/// degeneracy flag; scoring skips their directional slot.
inline SrpDerivation derive_srp(const SigScene& scene, const Ontology& ont = Ontology::standard(),
                                const ProximalBins& bins = {}) {
    SrpDerivation out;
    const auto objects = canonical_objects(scene, ont);
    const size_t n = objects.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            SrpPair pair;
            pair.a = objects[i].name;
            pair.b = objects[j].name;
            pair.a_node = static_cast<int>(i);
            pair.b_node = static_cast<int>(j);
            const GridPos delta = objects[i].pos - objects[j].pos;
            pair.degenerate_direction = delta.x == 0.0 && delta.y == 0.0;
            out.tmpl.pairs.push_back(std::move(pair));
            out.directional.push_back(direction_bin(objects[i].pos, objects[j].pos));
            out.proximal.push_back(bins.bin(grid_distance(objects[i].pos, objects[j].pos)));
        }
    }
    return out;
}

struct SrpfScores {
    SrdScores directional;
    SrdScores proximal;
    int degenerate_skipped = 0;
};

/// Score answered preposition indices against a derived template.
/// Directional slots flagged degenerate are excluded; optional per-slot
/// weights (mean attention of the two referenced objects) feed the
/// human-like variant.
inline SrpfScores score_srpf(const SrpAnswers& answers, const SrpDerivation& gt,
                             std::span<const double> pair_weights = {}) {
    const size_t slots = gt.tmpl.pairs.size();
    if (answers.directional.size() != slots || answers.proximal.size() != slots)
        fail(errc::length_mismatch, "answers do not cover the template");
    if (!pair_weights.empty() && pair_weights.size() != slots)
        fail(errc::length_mismatch, "weight list does not cover the template");

    std::vector<int> dir_pred, dir_gt;
    std::vector<double> dir_w;
    for (size_t i = 0; i < slots; ++i) {
        if (gt.tmpl.pairs[i].degenerate_direction) continue;
        dir_pred.push_back(answers.directional[i]);
        dir_gt.push_back(gt.directional[i]);
        if (!pair_weights.empty()) dir_w.push_back(pair_weights[i]);
    }

    SrpfScores out;
    out.degenerate_skipped = static_cast<int>(slots - dir_gt.size());
    out.directional = srd_scores(dir_pred, dir_gt, RelationScale::directional, dir_w);
    out.proximal = srd_scores(answers.proximal, gt.proximal, RelationScale::proximal, pair_weights);
    return out;
}

}  // namespace sig
