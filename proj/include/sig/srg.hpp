#pragma once

#include <vector>

#include "sig/attention_grid.hpp"
#include "sig/error.hpp"
#include "sig/geometry.hpp"
#include "sig/matching.hpp"

namespace sig {

struct SrgNode {
    GridPos pos;
    ObjectAttrs attrs;
    int category = kEgoCategory;
    bool is_ego = false;
};

struct SrgEdge {
    int from = 0;
    int to = 0;
    int direction = 0;  // sector bin of pos[from] - pos[to]
    double length = 0.0;
};

/// Complete directed graph over the metric-participating objects of one
/// scene (ego included). Edges are stored in row-major (from, to) order,
/// so the edge (i, j) sits at index i*(n-1) + (j < i ? j : j-1).
struct SpatialRelationGraph {
    std::vector<SrgNode> nodes;
    std::vector<SrgEdge> edges;

    int edge_index(int from, int to) const {
        const int n = static_cast<int>(nodes.size());
        return from * (n - 1) + (to < from ? to : to - 1);
    }
};

inline SpatialRelationGraph build_srg(const SigScene& scene, const Ontology& ont = Ontology::standard()) {
    SpatialRelationGraph g;
    g.nodes.reserve(scene.object_count() + scene.lanes.size() + 1);
    for (size_t ci = 0; ci < ont.categories.size(); ++ci) {
        if (!ont.categories[ci].in_metrics) continue;
        for (const SceneObject& obj : scene.categories[ci])
            g.nodes.push_back({obj.pos, obj.attrs, static_cast<int>(ci), false});
    }
    if (ont.include_lanes) {
        for (size_t li = 0; li < scene.lanes.size(); ++li) {
            ObjectAttrs attrs;
            attrs.order = static_cast<int>(li) + 1;
            g.nodes.push_back({scene.lanes[li].centroid(), attrs, kLanesCategory, false});
        }
    }
    g.nodes.push_back({scene.ego, ObjectAttrs{}, kEgoCategory, true});

    const int n = static_cast<int>(g.nodes.size());
    g.edges.reserve(static_cast<size_t>(n) * (n - 1));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            SrgEdge e;
            e.from = i;
            e.to = j;
            e.direction = direction_bin(g.nodes[i].pos, g.nodes[j].pos);
            e.length = grid_distance(g.nodes[i].pos, g.nodes[j].pos);
            g.edges.push_back(e);
        }
    return g;
}

/// Edit costs and combination weights for the graph edit distance.
struct GedCosts {
    double lambda_node = 2.0;    // attribute-mismatch addend on node substitution
    double eta_node_del = 5.0;   // removing an unmatched predicted node
    double eta_node_ins = 5.0;   // adding an unmatched GT node
    double lambda_edge = 2.0;    // direction-mismatch addend on edge substitution
    double eta_edge_del = 2.0;
    double eta_edge_ins = 2.0;
    double gamma = 1.0;          // node weight in the total distance
    double beta = 0.5;           // edge weight in the total distance
};

namespace detail {

inline bool node_attrs_equal(const SrgNode& a, const SrgNode& b) {
    return a.category == b.category && a.is_ego == b.is_ego && a.attrs == b.attrs;
}

inline double node_weight(const AttentionGrid* attn, const SrgNode& node) {
    return attn ? attention_at(*attn, node.pos) : 1.0;
}

inline double edge_weight(const AttentionGrid* attn, const SpatialRelationGraph& g, const SrgEdge& e) {
    if (!attn) return 1.0;
    return 0.5 * (attention_at(*attn, g.nodes[e.from].pos) + attention_at(*attn, g.nodes[e.to].pos));
}

}  // namespace detail

/// Matching-induced node edit distance: substitution cost (distance plus
/// an attribute-mismatch addend) per matched pair, insertion per extra GT
/// node, deletion per extra predicted node. With an attention grid every
/// term is scaled by the weight at the node's own cell.
inline double node_edit_distance(const SpatialRelationGraph& gt, const SpatialRelationGraph& pred,
                                 const NodeCorrespondence& corr, const GedCosts& costs,
                                 const AttentionGrid* attn = nullptr) {
    double total = 0.0;
    for (size_t i = 0; i < gt.nodes.size(); ++i) {
        const int j = corr.gt_to_pred[i];
        if (j >= 0) {
            double sub = grid_distance(gt.nodes[i].pos, pred.nodes[j].pos);
            if (!detail::node_attrs_equal(gt.nodes[i], pred.nodes[j])) sub += costs.lambda_node;
            total += detail::node_weight(attn, gt.nodes[i]) * sub;
        } else {
            total += detail::node_weight(attn, gt.nodes[i]) * costs.eta_node_ins;
        }
    }
    for (size_t j = 0; j < pred.nodes.size(); ++j)
        if (corr.pred_to_gt[j] < 0)
            total += detail::node_weight(attn, pred.nodes[j]) * costs.eta_node_del;
    return total;
}

/// Matching-induced edge edit distance. Edges whose endpoints are both
/// matched pair up with the corresponding predicted edge and pay a length
/// difference plus a direction-mismatch addend; every other edge pays the
/// insertion (GT side) or deletion (predicted side) cost. Attention
/// weights average over the two incident nodes.
inline double edge_edit_distance(const SpatialRelationGraph& gt, const SpatialRelationGraph& pred,
                                 const NodeCorrespondence& corr, const GedCosts& costs,
                                 const AttentionGrid* attn = nullptr) {
    double total = 0.0;
    for (const SrgEdge& e : gt.edges) {
        const int from = corr.gt_to_pred[e.from];
        const int to = corr.gt_to_pred[e.to];
        if (from >= 0 && to >= 0) {
            const SrgEdge& other = pred.edges[pred.edge_index(from, to)];
            double sub = std::abs(e.length - other.length);
            if (e.direction != other.direction) sub += costs.lambda_edge;
            total += detail::edge_weight(attn, gt, e) * sub;
        } else {
            total += detail::edge_weight(attn, gt, e) * costs.eta_edge_ins;
        }
    }
    for (const SrgEdge& e : pred.edges) {
        if (corr.pred_to_gt[e.from] < 0 || corr.pred_to_gt[e.to] < 0)
            total += detail::edge_weight(attn, pred, e) * costs.eta_edge_del;
    }
    return total;
}

/// Distances and worst-case masses needed to turn edit distances into a
/// similarity for any (gamma, beta) pair.
struct SrgsComponents {
    double d_node = 0.0;
    double d_edge = 0.0;
    double node_max = 0.0;  // all nodes unmatched
    double edge_max = 0.0;  // all edges unmatched
};

struct SrgsResult {
    double d_node = 0.0;
    double d_edge = 0.0;
    double d_total = 0.0;  // gamma = beta = 1
    double d_max = 0.0;
    double s = 0.0;        // similarity at gamma = beta = 1
    double ws = 0.0;       // weighted similarity at the configured pair
};

inline double srgs_similarity(const SrgsComponents& c, double gamma, double beta) {
    const double d_total = gamma * c.d_node + beta * c.d_edge;
    const double d_max = gamma * c.node_max + beta * c.edge_max;
    if (d_max == 0.0) {
        if (d_total > 0.0) fail(errc::degenerate_d_max, "D_max is zero but D_total is positive");
        return 1.0;
    }
    return std::max(0.0, 1.0 - d_total / d_max);
}

inline SrgsComponents srgs_components(const SpatialRelationGraph& gt, const SpatialRelationGraph& pred,
                                      const NodeCorrespondence& corr, const GedCosts& costs,
                                      const AttentionGrid* attn = nullptr) {
    SrgsComponents c;
    c.d_node = node_edit_distance(gt, pred, corr, costs, attn);
    c.d_edge = edge_edit_distance(gt, pred, corr, costs, attn);
    for (const SrgNode& n : gt.nodes) c.node_max += detail::node_weight(attn, n) * costs.eta_node_ins;
    for (const SrgNode& n : pred.nodes) c.node_max += detail::node_weight(attn, n) * costs.eta_node_del;
    for (const SrgEdge& e : gt.edges) c.edge_max += detail::edge_weight(attn, gt, e) * costs.eta_edge_ins;
    for (const SrgEdge& e : pred.edges) c.edge_max += detail::edge_weight(attn, pred, e) * costs.eta_edge_del;
    return c;
}

/// Spatial relation graph similarity between a predicted scene and ground
/// truth. Ego alignment and the bipartite matching happen internally; the
/// returned S uses gamma = beta = 1 and WS uses the configured pair.
inline SrgsResult srgs(const SigScene& pred, const SigScene& gt, const GedCosts& costs,
                       const MatchWeights& w, const Ontology& ont = Ontology::standard(),
                       const AttentionGrid* attn = nullptr) {
    // Alignment with a zero offset is the identity; skip the copy then.
    SigScene aligned_storage;
    const SigScene* aligned = &pred;
    if (!(pred.ego == gt.ego)) {
        aligned_storage = align_ego(pred, gt);
        aligned = &aligned_storage;
    }
    const SceneMatch match = match_scene(*aligned, gt, w, ont);
    const NodeCorrespondence corr = node_correspondence(match, gt, *aligned, ont);
    const SpatialRelationGraph gt_graph = build_srg(gt, ont);
    const SpatialRelationGraph pred_graph = build_srg(*aligned, ont);
    const SrgsComponents c = srgs_components(gt_graph, pred_graph, corr, costs, attn);

    SrgsResult out;
    out.d_node = c.d_node;
    out.d_edge = c.d_edge;
    out.d_total = c.d_node + c.d_edge;
    out.d_max = c.node_max + c.edge_max;
    out.s = srgs_similarity(c, 1.0, 1.0);
    out.ws = srgs_similarity(c, costs.gamma, costs.beta);
    return out;
}

}  // namespace sig
