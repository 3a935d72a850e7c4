#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "sig/assignment.hpp"
#include "sig/attention.hpp"
#include "sig/error.hpp"
#include "sig/io.hpp"
#include "sig/mlsm.hpp"
#include "sig/ontology.hpp"
#include "sig/srd.hpp"
#include "sig/srg.hpp"

namespace sig {

/// Everything an evaluation run depends on, serializable to one JSON
/// file. Defaults reproduce the documented metric conventions; reports
/// embed the resolved config so every number is reproducible.
struct EvalConfig {
    MatchWeights match_weights;
    MlsmConfig mlsm;
    GedCosts ged;
    ProximalBins proximal;
    double smoothing_eps = 1e-7;
    StampKernel gaze_kernel = StampKernel::disk;
    std::string baseline_map;  // optional IG baseline path; empty = uniform
    enum class CorpusAggregation { frame_mean, object_weighted };
    CorpusAggregation corpus_aggregation = CorpusAggregation::frame_mean;
    int jobs = 1;
    Ontology ontology = Ontology::standard();
};

namespace detail {

template <typename T>
void read_field(const nlohmann::json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

inline void check_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                       const std::string& where) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed) known = known || item.key() == key;
        if (!known) fail(errc::config_error, where + ": unknown key '" + item.key() + "'");
    }
}

}  // namespace detail

inline nlohmann::ordered_json config_to_json(const EvalConfig& cfg) {
    nlohmann::ordered_json j;
    j["match_weights"] = {{"color", cfg.match_weights.color},
                          {"order", cfg.match_weights.order},
                          {"kind", cfg.match_weights.kind}};
    j["mlsm"] = {{"thresholds", cfg.mlsm.thresholds},
                 {"aggregation", cfg.mlsm.aggregation == MlsmConfig::Aggregation::gt_weighted
                                     ? "gt_weighted"
                                     : "uniform"}};
    j["ged"] = {{"lambda_node", cfg.ged.lambda_node}, {"eta_node_del", cfg.ged.eta_node_del},
                {"eta_node_ins", cfg.ged.eta_node_ins}, {"lambda_edge", cfg.ged.lambda_edge},
                {"eta_edge_del", cfg.ged.eta_edge_del}, {"eta_edge_ins", cfg.ged.eta_edge_ins},
                {"gamma", cfg.ged.gamma}, {"beta", cfg.ged.beta}};
    j["proximal_bin_edges"] = cfg.proximal.edges;
    j["smoothing_eps"] = cfg.smoothing_eps;
    j["gaze_kernel"] = cfg.gaze_kernel == StampKernel::disk ? "disk" : "gaussian";
    j["baseline_map"] = cfg.baseline_map;
    j["corpus_aggregation"] =
        cfg.corpus_aggregation == EvalConfig::CorpusAggregation::frame_mean ? "frame_mean"
                                                                            : "object_weighted";
    j["jobs"] = cfg.jobs;
    j["include_lanes"] = cfg.ontology.include_lanes;
    if (!(cfg.ontology.categories == Ontology::standard().categories &&
          cfg.ontology.lanes_key == "traffic_lanes" && cfg.ontology.lane_label == "lane" &&
          cfg.ontology.self_key == "self")) {
        nlohmann::ordered_json cats = nlohmann::ordered_json::array();
        for (const CategoryDef& c : cfg.ontology.categories)
            cats.push_back({{"name", c.name},
                            {"json_key", c.json_key},
                            {"label", c.label},
                            {"schema", c.schema == AttributeSchema::full ? "full" : "order_only"},
                            {"in_metrics", c.in_metrics}});
        j["ontology"] = {{"categories", cats},
                         {"lanes_key", cfg.ontology.lanes_key},
                         {"lane_label", cfg.ontology.lane_label},
                         {"self_key", cfg.ontology.self_key}};
    }
    return j;
}

inline EvalConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(errc::config_error, "config must be a JSON object");
    detail::check_keys(j,
                       {"match_weights", "mlsm", "ged", "proximal_bin_edges", "smoothing_eps",
                        "gaze_kernel", "baseline_map", "corpus_aggregation", "jobs",
                        "include_lanes", "ontology"},
                       "config");
    EvalConfig cfg;
    try {
        if (j.contains("match_weights")) {
            const auto& w = j.at("match_weights");
            detail::check_keys(w, {"color", "order", "kind"}, "match_weights");
            detail::read_field(w, "color", cfg.match_weights.color);
            detail::read_field(w, "order", cfg.match_weights.order);
            detail::read_field(w, "kind", cfg.match_weights.kind);
            for (double v : {cfg.match_weights.color, cfg.match_weights.order, cfg.match_weights.kind})
                if (!(v > 0.0 && v <= 1.0))
                    fail(errc::config_error, "match weights must lie in (0, 1]");
        }
        if (j.contains("mlsm")) {
            const auto& m = j.at("mlsm");
            detail::check_keys(m, {"thresholds", "aggregation"}, "mlsm");
            detail::read_field(m, "thresholds", cfg.mlsm.thresholds);
            if (cfg.mlsm.thresholds.empty()) fail(errc::config_error, "mlsm.thresholds is empty");
            for (size_t i = 0; i < cfg.mlsm.thresholds.size(); ++i) {
                if (cfg.mlsm.thresholds[i] <= 0.0)
                    fail(errc::config_error, "mlsm.thresholds must be positive");
                if (i > 0 && cfg.mlsm.thresholds[i] <= cfg.mlsm.thresholds[i - 1])
                    fail(errc::config_error, "mlsm.thresholds must be strictly increasing");
            }
            if (m.contains("aggregation")) {
                const std::string a = m.at("aggregation").get<std::string>();
                if (a == "gt_weighted")
                    cfg.mlsm.aggregation = MlsmConfig::Aggregation::gt_weighted;
                else if (a == "uniform")
                    cfg.mlsm.aggregation = MlsmConfig::Aggregation::uniform;
                else
                    fail(errc::config_error, "mlsm.aggregation must be gt_weighted or uniform");
            }
        }
        if (j.contains("ged")) {
            const auto& g = j.at("ged");
            detail::check_keys(g,
                               {"lambda_node", "eta_node_del", "eta_node_ins", "lambda_edge",
                                "eta_edge_del", "eta_edge_ins", "gamma", "beta"},
                               "ged");
            detail::read_field(g, "lambda_node", cfg.ged.lambda_node);
            detail::read_field(g, "eta_node_del", cfg.ged.eta_node_del);
            detail::read_field(g, "eta_node_ins", cfg.ged.eta_node_ins);
            detail::read_field(g, "lambda_edge", cfg.ged.lambda_edge);
            detail::read_field(g, "eta_edge_del", cfg.ged.eta_edge_del);
            detail::read_field(g, "eta_edge_ins", cfg.ged.eta_edge_ins);
            detail::read_field(g, "gamma", cfg.ged.gamma);
            detail::read_field(g, "beta", cfg.ged.beta);
            for (double v : {cfg.ged.lambda_node, cfg.ged.eta_node_del, cfg.ged.eta_node_ins,
                             cfg.ged.lambda_edge, cfg.ged.eta_edge_del, cfg.ged.eta_edge_ins,
                             cfg.ged.gamma, cfg.ged.beta})
                if (v < 0.0) fail(errc::config_error, "ged costs must be nonnegative");
            if (cfg.ged.gamma + cfg.ged.beta <= 0.0)
                fail(errc::config_error, "ged gamma + beta must be positive");
        }
        if (j.contains("proximal_bin_edges")) {
            const auto edges = j.at("proximal_bin_edges").get<std::vector<double>>();
            if (edges.size() != cfg.proximal.edges.size())
                fail(errc::config_error, "proximal_bin_edges needs exactly 4 values");
            for (size_t i = 0; i < edges.size(); ++i) {
                if (edges[i] <= 0.0 || (i > 0 && edges[i] <= edges[i - 1]))
                    fail(errc::config_error, "proximal_bin_edges must be positive and increasing");
                cfg.proximal.edges[i] = edges[i];
            }
        }
        detail::read_field(j, "smoothing_eps", cfg.smoothing_eps);
        if (cfg.smoothing_eps <= 0.0) fail(errc::config_error, "smoothing_eps must be positive");
        if (j.contains("gaze_kernel")) {
            const std::string k = j.at("gaze_kernel").get<std::string>();
            if (k == "disk")
                cfg.gaze_kernel = StampKernel::disk;
            else if (k == "gaussian")
                cfg.gaze_kernel = StampKernel::gaussian;
            else
                fail(errc::config_error, "gaze_kernel must be disk or gaussian");
        }
        detail::read_field(j, "baseline_map", cfg.baseline_map);
        if (j.contains("corpus_aggregation")) {
            const std::string a = j.at("corpus_aggregation").get<std::string>();
            if (a == "frame_mean")
                cfg.corpus_aggregation = EvalConfig::CorpusAggregation::frame_mean;
            else if (a == "object_weighted")
                cfg.corpus_aggregation = EvalConfig::CorpusAggregation::object_weighted;
            else
                fail(errc::config_error, "corpus_aggregation must be frame_mean or object_weighted");
        }
        detail::read_field(j, "jobs", cfg.jobs);
        if (cfg.jobs < 1) fail(errc::config_error, "jobs must be at least 1");
        if (j.contains("ontology")) {
            const auto& o = j.at("ontology");
            detail::check_keys(o, {"categories", "lanes_key", "lane_label", "self_key"}, "ontology");
            if (o.contains("categories")) {
                cfg.ontology.categories.clear();
                for (const auto& c : o.at("categories")) {
                    detail::check_keys(c, {"name", "json_key", "label", "schema", "in_metrics"},
                                       "ontology category");
                    CategoryDef def;
                    detail::read_field(c, "name", def.name);
                    detail::read_field(c, "json_key", def.json_key);
                    detail::read_field(c, "label", def.label);
                    if (c.contains("schema")) {
                        const std::string s = c.at("schema").get<std::string>();
                        if (s == "full")
                            def.schema = AttributeSchema::full;
                        else if (s == "order_only")
                            def.schema = AttributeSchema::order_only;
                        else
                            fail(errc::config_error, "category schema must be full or order_only");
                    }
                    detail::read_field(c, "in_metrics", def.in_metrics);
                    if (def.name.empty() || def.json_key.empty() ||
                        (def.schema == AttributeSchema::order_only && def.label.empty()))
                        fail(errc::config_error, "category definitions need name, json_key and label");
                    cfg.ontology.categories.push_back(std::move(def));
                }
                if (cfg.ontology.categories.empty())
                    fail(errc::config_error, "ontology needs at least one category");
            }
            detail::read_field(o, "lanes_key", cfg.ontology.lanes_key);
            detail::read_field(o, "lane_label", cfg.ontology.lane_label);
            detail::read_field(o, "self_key", cfg.ontology.self_key);
        }
        detail::read_field(j, "include_lanes", cfg.ontology.include_lanes);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::config_error, std::string("config field has the wrong type: ") + e.what());
    }
    return cfg;
}

inline EvalConfig load_config(const std::string& path_flag) {
    std::string path = path_flag;
    if (path.empty()) {
        if (const char* env = std::getenv("SIG_EVAL_CONFIG")) path = env;
    }
    if (path.empty()) return {};
    nlohmann::json doc = nlohmann::json::parse(read_file(path), nullptr, false);
    if (doc.is_discarded()) fail(errc::config_error, "'" + path + "' is not valid JSON");
    return config_from_json(doc);
}

}  // namespace sig
