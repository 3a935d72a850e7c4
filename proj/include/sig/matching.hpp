#pragma once

#include <string>
#include <vector>

#include "sig/assignment.hpp"
#include "sig/error.hpp"
#include "sig/geometry.hpp"
#include "sig/ontology.hpp"
#include "sig/scene.hpp"

namespace sig {

/// Pair cost for full-schema objects: Euclidean grid distance scaled by
/// one multiplicative factor per matching attribute. Matching color,
/// order or kind each shrink the cost, granting that pair extra spatial
/// tolerance in the assignment.
inline double vehicle_cost(const SceneObject& gt, const SceneObject& pred, const MatchWeights& w) {
    double cost = grid_distance(gt.pos, pred.pos);
    if (gt.attrs.color == pred.attrs.color) cost *= w.color;
    if (gt.attrs.order == pred.attrs.order) cost *= w.order;
    if (gt.attrs.kind == pred.attrs.kind) cost *= w.kind;
    return cost;
}

/// Pair cost for order-only objects (signs, lights): distance scaled by
/// the order factor alone.
inline double sign_light_cost(const SceneObject& gt, const SceneObject& pred, const MatchWeights& w) {
    double cost = grid_distance(gt.pos, pred.pos);
    if (gt.attrs.order == pred.attrs.order) cost *= w.order;
    return cost;
}

/// Symmetric point-set distance used when lanes are opted into the
/// metric set: mean nearest-neighbour distance, averaged over both
/// directions.
inline double chamfer_distance(const Polyline& a, const Polyline& b) {
    if (a.points.empty() && b.points.empty()) return 0.0;
    if (a.points.empty() || b.points.empty())
        return grid_distance(a.centroid(), b.centroid());
    auto one_way = [](const Polyline& from, const Polyline& to) {
        double sum = 0.0;
        for (const GridPos& p : from.points) {
            double best = grid_distance(p, to.points.front());
            for (size_t i = 1; i < to.points.size(); ++i)
                best = std::min(best, grid_distance(p, to.points[i]));
            sum += best;
        }
        return sum / static_cast<double>(from.points.size());
    };
    return 0.5 * (one_way(a, b) + one_way(b, a));
}

/// One matched pair plus the observations every downstream metric needs:
/// the raw grid distance and per-attribute agreement.
struct PairObs {
    int gt = -1;
    int pred = -1;
    double cost = 0.0;
    double dist = 0.0;
    bool kind_match = false;
    bool order_match = false;
    bool color_match = false;
};

struct CategoryMatch {
    std::vector<PairObs> pairs;
    std::vector<int> unmatched_gt;
    std::vector<int> unmatched_pred;
    int gt_count = 0;
    int pred_count = 0;
};

/// Per-category matchings between a predicted and a ground-truth scene.
/// When lanes participate they appear as one extra trailing entry.
struct SceneMatch {
    std::vector<CategoryMatch> categories;
    bool lanes_included = false;
};

namespace detail {

inline CategoryMatch match_category(const std::vector<SceneObject>& gt,
                                    const std::vector<SceneObject>& pred,
                                    AttributeSchema schema,
                                    const MatchWeights& w) {
    CategoryMatch out;
    out.gt_count = static_cast<int>(gt.size());
    out.pred_count = static_cast<int>(pred.size());

    CostMatrix cost(out.gt_count, out.pred_count);
    for (int r = 0; r < out.gt_count; ++r)
        for (int c = 0; c < out.pred_count; ++c)
            cost.at(r, c) = schema == AttributeSchema::full ? vehicle_cost(gt[r], pred[c], w)
                                                            : sign_light_cost(gt[r], pred[c], w);

    Matching m = solve_assignment(cost);
    out.unmatched_gt = std::move(m.unmatched_gt);
    out.unmatched_pred = std::move(m.unmatched_pred);
    out.pairs.reserve(m.pairs.size());
    for (const MatchedPair& p : m.pairs) {
        PairObs obs;
        obs.gt = p.gt;
        obs.pred = p.pred;
        obs.cost = p.cost;
        obs.dist = grid_distance(gt[p.gt].pos, pred[p.pred].pos);
        obs.kind_match = gt[p.gt].attrs.kind == pred[p.pred].attrs.kind;
        obs.order_match = gt[p.gt].attrs.order == pred[p.pred].attrs.order;
        obs.color_match = gt[p.gt].attrs.color == pred[p.pred].attrs.color;
        out.pairs.push_back(obs);
    }
    return out;
}

inline CategoryMatch match_lanes(const std::vector<Polyline>& gt,
                                 const std::vector<Polyline>& pred,
                                 const MatchWeights& w) {
    CategoryMatch out;
    out.gt_count = static_cast<int>(gt.size());
    out.pred_count = static_cast<int>(pred.size());

    CostMatrix cost(out.gt_count, out.pred_count);
    for (int r = 0; r < out.gt_count; ++r)
        for (int c = 0; c < out.pred_count; ++c) {
            double v = chamfer_distance(gt[r], pred[c]);
            if (r == c) v *= w.order;  // lanes are rank-identified, like signs
            cost.at(r, c) = v;
        }

    Matching m = solve_assignment(cost);
    out.unmatched_gt = std::move(m.unmatched_gt);
    out.unmatched_pred = std::move(m.unmatched_pred);
    for (const MatchedPair& p : m.pairs) {
        PairObs obs;
        obs.gt = p.gt;
        obs.pred = p.pred;
        obs.cost = p.cost;
        obs.dist = chamfer_distance(gt[p.gt], pred[p.pred]);
        obs.kind_match = true;
        obs.order_match = p.gt == p.pred;
        obs.color_match = true;
        out.pairs.push_back(obs);
    }
    return out;
}

}  // namespace detail

/// Match a predicted scene against ground truth, one independent
/// assignment per metric-participating category. Ego is matched to ego
/// implicitly at zero cost and never enters a cost matrix. Scenes are
/// expected to be ego-aligned already.
inline SceneMatch match_scene(const SigScene& pred, const SigScene& gt, const MatchWeights& w,
                              const Ontology& ont = Ontology::standard()) {
    SceneMatch out;
    out.categories.reserve(ont.categories.size() + 1);
    for (size_t ci = 0; ci < ont.categories.size(); ++ci) {
        if (!ont.categories[ci].in_metrics) {
            CategoryMatch skipped;
            out.categories.push_back(skipped);
            continue;
        }
        out.categories.push_back(detail::match_category(gt.categories[ci], pred.categories[ci],
                                                        ont.categories[ci].schema, w));
    }
    if (ont.include_lanes) {
        out.categories.push_back(detail::match_lanes(gt.lanes, pred.lanes, w));
        out.lanes_included = true;
    }
    return out;
}

inline constexpr int kLanesCategory = -2;
inline constexpr int kEgoCategory = -3;

/// One entry of the canonical object enumeration: metric categories in
/// registry order (objects by order), lanes when opted in, ego last. SRG
/// nodes and SRP pair enumeration both follow this order.
struct ObjectRef {
    GridPos pos;
    ObjectAttrs attrs;
    int category = kEgoCategory;
    bool is_ego = false;
};

inline std::vector<ObjectRef> object_refs(const SigScene& scene,
                                          const Ontology& ont = Ontology::standard()) {
    std::vector<ObjectRef> out;
    out.reserve(scene.object_count() + scene.lanes.size() + 1);
    for (size_t ci = 0; ci < ont.categories.size(); ++ci) {
        if (!ont.categories[ci].in_metrics) continue;
        for (const SceneObject& obj : scene.categories[ci])
            out.push_back({obj.pos, obj.attrs, static_cast<int>(ci), false});
    }
    if (ont.include_lanes) {
        for (size_t li = 0; li < scene.lanes.size(); ++li) {
            ObjectAttrs attrs;
            attrs.order = static_cast<int>(li) + 1;
            out.push_back({scene.lanes[li].centroid(), attrs, kLanesCategory, false});
        }
    }
    out.push_back({scene.ego, ObjectAttrs{}, kEgoCategory, true});
    return out;
}

/// Canonical enumeration with display names attached.
struct NamedObject {
    std::string name;
    GridPos pos;
    ObjectAttrs attrs;
    int category = kEgoCategory;
    bool is_ego = false;
};

inline std::vector<NamedObject> canonical_objects(const SigScene& scene,
                                                  const Ontology& ont = Ontology::standard()) {
    std::vector<NamedObject> out;
    const auto refs = object_refs(scene, ont);
    out.reserve(refs.size());
    for (const ObjectRef& ref : refs) {
        std::string name;
        if (ref.is_ego)
            name = ont.self_key;
        else if (ref.category == kLanesCategory)
            name = ont.lane_label + " " + std::to_string(ref.attrs.order);
        else
            name = object_name(ont.categories[static_cast<size_t>(ref.category)], ref.attrs);
        out.push_back({std::move(name), ref.pos, ref.attrs, ref.category, ref.is_ego});
    }
    return out;
}

/// Node-level correspondence between the canonical object lists of the
/// two scenes, induced by the per-category matchings plus the implicit
/// ego pair. -1 marks an unmatched node.
struct NodeCorrespondence {
    std::vector<int> gt_to_pred;
    std::vector<int> pred_to_gt;
};

inline NodeCorrespondence node_correspondence(const SceneMatch& match, const SigScene& gt,
                                              const SigScene& pred,
                                              const Ontology& ont = Ontology::standard()) {
    int gt_nodes = 1, pred_nodes = 1;  // ego
    for (size_t ci = 0; ci < ont.categories.size(); ++ci) {
        if (!ont.categories[ci].in_metrics) continue;
        gt_nodes += static_cast<int>(gt.categories[ci].size());
        pred_nodes += static_cast<int>(pred.categories[ci].size());
    }
    if (ont.include_lanes) {
        gt_nodes += static_cast<int>(gt.lanes.size());
        pred_nodes += static_cast<int>(pred.lanes.size());
    }

    NodeCorrespondence corr;
    corr.gt_to_pred.assign(static_cast<size_t>(gt_nodes), -1);
    corr.pred_to_gt.assign(static_cast<size_t>(pred_nodes), -1);
    int gt_off = 0, pred_off = 0;
    for (size_t ci = 0; ci < ont.categories.size(); ++ci) {
        if (!ont.categories[ci].in_metrics) continue;
        for (const PairObs& p : match.categories[ci].pairs) {
            corr.gt_to_pred[gt_off + p.gt] = pred_off + p.pred;
            corr.pred_to_gt[pred_off + p.pred] = gt_off + p.gt;
        }
        gt_off += static_cast<int>(gt.categories[ci].size());
        pred_off += static_cast<int>(pred.categories[ci].size());
    }
    if (match.lanes_included) {
        for (const PairObs& p : match.categories.back().pairs) {
            corr.gt_to_pred[gt_off + p.gt] = pred_off + p.pred;
            corr.pred_to_gt[pred_off + p.pred] = gt_off + p.gt;
        }
    }
    corr.gt_to_pred[gt_nodes - 1] = pred_nodes - 1;  // ego is always matched to ego
    corr.pred_to_gt[pred_nodes - 1] = gt_nodes - 1;
    return corr;
}

}  // namespace sig
