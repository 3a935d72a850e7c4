#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sig/attention.hpp"
#include "sig/config.hpp"
#include "sig/error.hpp"
#include "sig/io.hpp"
#include "sig/mlsm.hpp"
#include "sig/srd.hpp"
#include "sig/srg.hpp"

namespace sig {

struct HumanMetrics {
    double s = 1.0;
    double ws = 1.0;
    SrpfScores srd;
};

/// All metric blocks for one frame.
struct FrameMetrics {
    MlsmReport mlsm;
    SrgsResult srgs;
    SrpfScores srd;
    bool srd_from_answers = false;
    int srd_total_slots = 0;    // template slots in the GT scene
    int srd_covered_slots = 0;  // slots actually scored (both members matched)
    std::optional<HumanMetrics> human;
    int object_count = 0;  // GT objects excluding ego
};

namespace detail {

/// Reorder or validate a derivation against an externally supplied pair
/// list. Names must resolve against the GT scene's canonical objects.
inline SrpDerivation apply_template_override(const SrpDerivation& derived,
                                             const std::vector<NamedObject>& objects,
                                             const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("pairs") || !doc.at("pairs").is_array())
        fail(errc::malformed_json, "template file needs a 'pairs' array");
    auto find_node = [&](const std::string& name) {
        for (size_t i = 0; i < objects.size(); ++i)
            if (objects[i].name == name) return static_cast<int>(i);
        fail(errc::malformed_json, "template names unknown object '" + name + "'");
    };
    SrpDerivation out;
    for (const auto& entry : doc.at("pairs")) {
        if (!entry.is_object() || !entry.contains("a") || !entry.contains("b"))
            fail(errc::malformed_json, "each template pair needs 'a' and 'b'");
        const int a = find_node(entry.at("a").get<std::string>());
        const int b = find_node(entry.at("b").get<std::string>());
        if (a == b) fail(errc::malformed_json, "template pair references one object twice");
        // Locate the derived slot carrying this unordered pair.
        bool found = false;
        for (size_t s = 0; s < derived.tmpl.pairs.size(); ++s) {
            const SrpPair& p = derived.tmpl.pairs[s];
            if (p.a_node == std::min(a, b) && p.b_node == std::max(a, b)) {
                SrpPair ordered = p;
                int dir = derived.directional[s];
                if (a != p.a_node) {  // template lists the pair in reversed order
                    ordered.a_node = a;
                    ordered.b_node = b;
                    std::swap(ordered.a, ordered.b);
                    dir = antipodal_bin(dir);
                }
                out.tmpl.pairs.push_back(ordered);
                out.directional.push_back(dir);
                out.proximal.push_back(derived.proximal[s]);
                found = true;
                break;
            }
        }
        if (!found) fail(errc::malformed_json, "template pair is not a valid object pair");
    }
    return out;
}

inline std::vector<double> pair_attention_weights(const SrpDerivation& gt_srp,
                                                  const std::vector<double>& node_attention) {
    std::vector<double> weights;
    weights.reserve(gt_srp.tmpl.pairs.size());
    for (const SrpPair& p : gt_srp.tmpl.pairs)
        weights.push_back(0.5 * (node_attention[p.a_node] + node_attention[p.b_node]));
    return weights;
}

/// Score SRD without an answer file by reading the predicted labels off
/// the predicted scene: a slot is scorable when both referenced objects
/// have matched counterparts.
inline SrpfScores derived_srd(const SrpDerivation& gt_srp, const std::vector<ObjectRef>& pred_objects,
                              const NodeCorrespondence& corr, const ProximalBins& bins,
                              std::span<const double> weights, int* covered) {
    std::vector<int> dir_pred, dir_gt, prox_pred, prox_gt;
    std::vector<double> dir_w, prox_w;
    for (size_t s = 0; s < gt_srp.tmpl.pairs.size(); ++s) {
        const SrpPair& p = gt_srp.tmpl.pairs[s];
        const int pa = corr.gt_to_pred[p.a_node];
        const int pb = corr.gt_to_pred[p.b_node];
        if (pa < 0 || pb < 0) continue;
        const GridPos a = pred_objects[pa].pos;
        const GridPos b = pred_objects[pb].pos;
        prox_pred.push_back(bins.bin(grid_distance(a, b)));
        prox_gt.push_back(gt_srp.proximal[s]);
        if (!weights.empty()) prox_w.push_back(weights[s]);
        if (!p.degenerate_direction) {
            dir_pred.push_back(direction_bin(a, b));
            dir_gt.push_back(gt_srp.directional[s]);
            if (!weights.empty()) dir_w.push_back(weights[s]);
        }
    }
    if (covered) *covered = static_cast<int>(prox_gt.size());
    SrpfScores out;
    out.directional = srd_scores(dir_pred, dir_gt, RelationScale::directional, dir_w);
    out.proximal = srd_scores(prox_pred, prox_gt, RelationScale::proximal, prox_w);
    return out;
}

}  // namespace detail

/// Evaluate one predicted scene against ground truth: ego alignment, one
/// matching per category, MLSM, SRGS, and SRD either from a supplied
/// answer file or re-derived from the predicted scene. An attention grid
/// adds the human-like SRGS and SRD blocks.
inline FrameMetrics evaluate_pair(const SigScene& pred, const SigScene& gt, const EvalConfig& cfg,
                                  const AttentionGrid* attn = nullptr,
                                  const SrpAnswers* answers = nullptr,
                                  const nlohmann::json* template_override = nullptr) {
    const Ontology& ont = cfg.ontology;
    const SigScene aligned = align_ego(pred, gt);
    const SceneMatch match = match_scene(aligned, gt, cfg.match_weights, ont);
    const NodeCorrespondence corr = node_correspondence(match, gt, aligned, ont);

    FrameMetrics out;
    out.object_count = static_cast<int>(gt.object_count());
    out.mlsm = mlsm_scores(aligned, gt, cfg.mlsm, cfg.match_weights, ont);

    const SpatialRelationGraph gt_graph = build_srg(gt, ont);
    const SpatialRelationGraph pred_graph = build_srg(aligned, ont);
    const SrgsComponents plain = srgs_components(gt_graph, pred_graph, corr, cfg.ged);
    out.srgs.d_node = plain.d_node;
    out.srgs.d_edge = plain.d_edge;
    out.srgs.d_total = plain.d_node + plain.d_edge;
    out.srgs.d_max = plain.node_max + plain.edge_max;
    out.srgs.s = srgs_similarity(plain, 1.0, 1.0);
    out.srgs.ws = srgs_similarity(plain, cfg.ged.gamma, cfg.ged.beta);

    SrpDerivation gt_srp = derive_srp(gt, ont, cfg.proximal);
    if (template_override)
        gt_srp = detail::apply_template_override(gt_srp, canonical_objects(gt, ont), *template_override);
    out.srd_total_slots = static_cast<int>(gt_srp.tmpl.pairs.size());

    const auto pred_objects = object_refs(aligned, ont);
    if (answers) {
        out.srd = score_srpf(*answers, gt_srp);
        out.srd_from_answers = true;
        out.srd_covered_slots = out.srd_total_slots;
    } else {
        out.srd = detail::derived_srd(gt_srp, pred_objects, corr, cfg.proximal, {},
                                      &out.srd_covered_slots);
    }

    if (attn) {
        HumanMetrics human;
        const SrgsComponents weighted = srgs_components(gt_graph, pred_graph, corr, cfg.ged, attn);
        human.s = srgs_similarity(weighted, 1.0, 1.0);
        human.ws = srgs_similarity(weighted, cfg.ged.gamma, cfg.ged.beta);
        const std::vector<double> node_attention = object_attention(*attn, gt, ont);
        const std::vector<double> weights = detail::pair_attention_weights(gt_srp, node_attention);
        if (answers) {
            human.srd = score_srpf(*answers, gt_srp, weights);
        } else {
            human.srd = detail::derived_srd(gt_srp, pred_objects, corr, cfg.proximal, weights, nullptr);
        }
        out.human = std::move(human);
    }
    return out;
}

struct FrameOutcome {
    std::string stem;
    bool ok = false;
    std::string error;
    FrameMetrics metrics;
};

struct CorpusOptions {
    std::filesystem::path pred_dir;
    std::filesystem::path gt_dir;
    std::filesystem::path answers_dir;    // empty = derive SRD from the predicted scene
    std::filesystem::path attention_dir;  // required for human-like blocks
    std::filesystem::path template_dir;   // optional per-frame pair-order override
    bool human_like = false;
    bool per_frame = false;
    int jobs = 1;
};

struct AggregateMetrics {
    double mlsm_p = 0, mlsm_r = 0, mlsm_f1 = 0, mlsm_assa = 0;
    double srgs_s = 0, srgs_ws = 0;
    SrdScores srd_dir, srd_prox;
    std::optional<HumanMetrics> human;
    int frames = 0;
};

struct CorpusResult {
    std::vector<FrameOutcome> frames;  // sorted by stem
    AggregateMetrics aggregate;
    int error_count = 0;
};

namespace detail {

inline AggregateMetrics aggregate_frames(const std::vector<FrameOutcome>& frames,
                                         EvalConfig::CorpusAggregation mode, bool human_like) {
    AggregateMetrics agg;
    double weight_sum = 0.0;
    HumanMetrics human{};
    human.s = human.ws = 0.0;
    human.srd.directional = human.srd.proximal = SrdScores{0, 0, 0, 0};
    SrdScores dir{0, 0, 0, 0}, prox{0, 0, 0, 0};
    for (const FrameOutcome& f : frames) {
        if (!f.ok) continue;
        ++agg.frames;
        const double w = mode == EvalConfig::CorpusAggregation::object_weighted
                             ? static_cast<double>(std::max(1, f.metrics.object_count))
                             : 1.0;
        weight_sum += w;
        agg.mlsm_p += w * f.metrics.mlsm.precision;
        agg.mlsm_r += w * f.metrics.mlsm.recall;
        agg.mlsm_f1 += w * f.metrics.mlsm.f1;
        agg.mlsm_assa += w * f.metrics.mlsm.assa;
        agg.srgs_s += w * f.metrics.srgs.s;
        agg.srgs_ws += w * f.metrics.srgs.ws;
        dir.mae += w * f.metrics.srd.directional.mae;
        dir.mse += w * f.metrics.srd.directional.mse;
        dir.acc += w * f.metrics.srd.directional.acc;
        dir.slots += f.metrics.srd.directional.slots;
        prox.mae += w * f.metrics.srd.proximal.mae;
        prox.mse += w * f.metrics.srd.proximal.mse;
        prox.acc += w * f.metrics.srd.proximal.acc;
        prox.slots += f.metrics.srd.proximal.slots;
        if (human_like && f.metrics.human) {
            human.s += w * f.metrics.human->s;
            human.ws += w * f.metrics.human->ws;
            human.srd.directional.mae += w * f.metrics.human->srd.directional.mae;
            human.srd.directional.mse += w * f.metrics.human->srd.directional.mse;
            human.srd.directional.acc += w * f.metrics.human->srd.directional.acc;
            human.srd.proximal.mae += w * f.metrics.human->srd.proximal.mae;
            human.srd.proximal.mse += w * f.metrics.human->srd.proximal.mse;
            human.srd.proximal.acc += w * f.metrics.human->srd.proximal.acc;
        }
    }
    if (weight_sum > 0.0) {
        for (double* v : {&agg.mlsm_p, &agg.mlsm_r, &agg.mlsm_f1, &agg.mlsm_assa, &agg.srgs_s,
                          &agg.srgs_ws, &dir.mae, &dir.mse, &dir.acc, &prox.mae, &prox.mse,
                          &prox.acc})
            *v /= weight_sum;
        if (human_like) {
            for (double* v : {&human.s, &human.ws, &human.srd.directional.mae,
                              &human.srd.directional.mse, &human.srd.directional.acc,
                              &human.srd.proximal.mae, &human.srd.proximal.mse,
                              &human.srd.proximal.acc})
                *v /= weight_sum;
            agg.human = human;
        }
    }
    agg.srd_dir = dir;
    agg.srd_prox = prox;
    return agg;
}

inline FrameOutcome evaluate_frame_files(const std::string& stem, const CorpusOptions& opt,
                                         const EvalConfig& cfg) {
    FrameOutcome out;
    out.stem = stem;
    try {
        const auto gt_path = opt.gt_dir / (stem + ".json");
        const auto pred_path = opt.pred_dir / (stem + ".json");
        if (!std::filesystem::exists(pred_path))
            fail(errc::io_error, "no prediction for frame '" + stem + "'");
        const SigScene gt = parse_sig(read_file(gt_path), cfg.ontology);
        const SigScene pred = parse_sig(read_file(pred_path), cfg.ontology);

        std::optional<AttentionGrid> attn;
        if (opt.human_like) attn = read_attention_grid(opt.attention_dir / (stem + ".txt"));

        std::optional<nlohmann::json> template_doc;
        if (!opt.template_dir.empty()) {
            const auto tpath = opt.template_dir / (stem + ".json");
            if (std::filesystem::exists(tpath)) {
                template_doc = nlohmann::json::parse(read_file(tpath), nullptr, false);
                if (template_doc->is_discarded())
                    fail(errc::malformed_json, "template for '" + stem + "' is not valid JSON");
            }
        }

        std::optional<SrpAnswers> answers;
        if (!opt.answers_dir.empty()) {
            const auto apath = opt.answers_dir / (stem + ".json");
            if (std::filesystem::exists(apath)) {
                // Slot count depends on a possible template override; parse
                // against the derived count, which the override preserves.
                SrpDerivation derived = derive_srp(gt, cfg.ontology, cfg.proximal);
                size_t slots = derived.tmpl.pairs.size();
                if (template_doc)
                    slots = detail::apply_template_override(derived, canonical_objects(gt, cfg.ontology),
                                                            *template_doc)
                                .tmpl.pairs.size();
                answers = parse_srp_answers(read_file(apath), slots);
            }
        }

        out.metrics = evaluate_pair(pred, gt, cfg, attn ? &*attn : nullptr,
                                    answers ? &*answers : nullptr,
                                    template_doc ? &*template_doc : nullptr);
        out.ok = true;
    } catch (const Error& e) {
        out.error = e.what();
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace detail

/// Evaluate every frame shared by the prediction and ground-truth
/// directories. Frames pair by file stem; per-frame failures land in the
/// outcome list instead of aborting the run. Worker threads process
/// frames independently and the aggregate is reduced in sorted order, so
/// the result is identical for any job count.
inline CorpusResult evaluate_corpus(const CorpusOptions& opt, const EvalConfig& cfg) {
    if (opt.human_like && opt.attention_dir.empty())
        fail(errc::config_error, "human-like evaluation needs an attention directory");
    if (!std::filesystem::is_directory(opt.gt_dir))
        fail(errc::config_error, "'" + opt.gt_dir.string() + "' is not a directory");
    if (!std::filesystem::is_directory(opt.pred_dir))
        fail(errc::config_error, "'" + opt.pred_dir.string() + "' is not a directory");

    std::vector<std::string> stems;
    for (const auto& entry : std::filesystem::directory_iterator(opt.gt_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            stems.push_back(entry.path().stem().string());
    std::sort(stems.begin(), stems.end());

    std::vector<std::string> extra_pred;
    for (const auto& entry : std::filesystem::directory_iterator(opt.pred_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            const std::string stem = entry.path().stem().string();
            if (!std::binary_search(stems.begin(), stems.end(), stem)) extra_pred.push_back(stem);
        }
    std::sort(extra_pred.begin(), extra_pred.end());

    CorpusResult result;
    result.frames.resize(stems.size());
    const int jobs = std::max(1, opt.jobs);
    if (jobs == 1 || stems.size() <= 1) {
        for (size_t i = 0; i < stems.size(); ++i)
            result.frames[i] = detail::evaluate_frame_files(stems[i], opt, cfg);
    } else {
        std::atomic<size_t> next{0};
        auto worker = [&]() {
            for (size_t i = next.fetch_add(1); i < stems.size(); i = next.fetch_add(1))
                result.frames[i] = detail::evaluate_frame_files(stems[i], opt, cfg);
        };
        std::vector<std::thread> pool;
        const int n = std::min<int>(jobs, static_cast<int>(stems.size()));
        pool.reserve(static_cast<size_t>(n));
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const std::string& stem : extra_pred) {
        FrameOutcome orphan;
        orphan.stem = stem;
        orphan.error = "IoError: prediction '" + stem + "' has no ground-truth counterpart";
        result.frames.push_back(std::move(orphan));
    }
    std::sort(result.frames.begin(), result.frames.end(),
              [](const FrameOutcome& a, const FrameOutcome& b) { return a.stem < b.stem; });

    for (const FrameOutcome& f : result.frames)
        if (!f.ok) ++result.error_count;
    result.aggregate = detail::aggregate_frames(result.frames, cfg.corpus_aggregation, opt.human_like);
    return result;
}

namespace detail {

inline nlohmann::ordered_json srd_json(const SrdScores& s) {
    return {{"mae", s.mae}, {"mse", s.mse}, {"acc", s.acc}, {"slots", s.slots}};
}

inline nlohmann::ordered_json human_json(const HumanMetrics& h) {
    return {{"srgs", {{"s", h.s}, {"ws", h.ws}}},
            {"srd_directional", srd_json(h.srd.directional)},
            {"srd_proximal", srd_json(h.srd.proximal)}};
}

}  // namespace detail

inline nlohmann::ordered_json frame_metrics_json(const FrameMetrics& m) {
    nlohmann::ordered_json j;
    j["mlsm"] = {{"precision", m.mlsm.precision},
                 {"recall", m.mlsm.recall},
                 {"f1", m.mlsm.f1},
                 {"assa", m.mlsm.assa}};
    j["srgs"] = {{"s", m.srgs.s},
                 {"ws", m.srgs.ws},
                 {"d_total", m.srgs.d_total},
                 {"d_max", m.srgs.d_max}};
    j["srd_directional"] = detail::srd_json(m.srd.directional);
    j["srd_proximal"] = detail::srd_json(m.srd.proximal);
    j["srd_source"] = m.srd_from_answers ? "answers" : "derived";
    j["srd_covered_slots"] = m.srd_covered_slots;
    j["srd_total_slots"] = m.srd_total_slots;
    if (m.human) j["human_like"] = detail::human_json(*m.human);
    j["object_count"] = m.object_count;
    return j;
}

inline nlohmann::ordered_json corpus_report_json(const CorpusResult& result, const EvalConfig& cfg,
                                                 bool per_frame) {
    nlohmann::ordered_json j;
    j["schema"] = "sig-eval/report/v1";
    j["config"] = config_to_json(cfg);
    j["frame_count"] = result.frames.size();
    j["scored_frames"] = result.aggregate.frames;

    nlohmann::ordered_json agg;
    agg["mlsm"] = {{"precision", result.aggregate.mlsm_p},
                   {"recall", result.aggregate.mlsm_r},
                   {"f1", result.aggregate.mlsm_f1},
                   {"assa", result.aggregate.mlsm_assa}};
    agg["srgs"] = {{"s", result.aggregate.srgs_s}, {"ws", result.aggregate.srgs_ws}};
    agg["srd_directional"] = detail::srd_json(result.aggregate.srd_dir);
    agg["srd_proximal"] = detail::srd_json(result.aggregate.srd_prox);
    if (result.aggregate.human) agg["human_like"] = detail::human_json(*result.aggregate.human);
    j["aggregate"] = std::move(agg);

    if (per_frame) {
        nlohmann::ordered_json frames = nlohmann::ordered_json::array();
        for (const FrameOutcome& f : result.frames) {
            if (!f.ok) continue;
            nlohmann::ordered_json fj;
            fj["frame"] = f.stem;
            fj["metrics"] = frame_metrics_json(f.metrics);
            frames.push_back(std::move(fj));
        }
        j["frames"] = std::move(frames);
    }

    nlohmann::ordered_json errors = nlohmann::ordered_json::array();
    for (const FrameOutcome& f : result.frames) {
        if (f.ok) continue;
        errors.push_back({{"frame", f.stem}, {"error", f.error}});
    }
    j["errors"] = std::move(errors);
    return j;
}

inline std::string corpus_report_csv(const CorpusResult& result) {
    std::string csv =
        "frame,mlsm_p,mlsm_r,mlsm_f1,mlsm_assa,srgs_s,srgs_ws,"
        "srd_dir_mae,srd_dir_mse,srd_dir_acc,srd_prox_mae,srd_prox_mse,srd_prox_acc\n";
    auto row = [&](const std::string& name, double p, double r, double f1, double assa, double s,
                   double ws, const SrdScores& dir, const SrdScores& prox) {
        csv += name;
        for (double v : {p, r, f1, assa, s, ws, dir.mae, dir.mse, dir.acc, prox.mae, prox.mse, prox.acc}) {
            csv += ',';
            csv += format_double(v);
        }
        csv += '\n';
    };
    for (const FrameOutcome& f : result.frames) {
        if (!f.ok) continue;
        const FrameMetrics& m = f.metrics;
        row(f.stem, m.mlsm.precision, m.mlsm.recall, m.mlsm.f1, m.mlsm.assa, m.srgs.s, m.srgs.ws,
            m.srd.directional, m.srd.proximal);
    }
    const AggregateMetrics& a = result.aggregate;
    row("aggregate", a.mlsm_p, a.mlsm_r, a.mlsm_f1, a.mlsm_assa, a.srgs_s, a.srgs_ws, a.srd_dir,
        a.srd_prox);
    return csv;
}

}  // namespace sig
