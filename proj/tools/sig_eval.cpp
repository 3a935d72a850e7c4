// sig-eval: batch scoring of predicted SIG scenes, SRP derivation, the
// gaze-to-grid attention pipeline, gaze-map metrics and a runtime bench.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sig/attention.hpp"
#include "sig/bench.hpp"
#include "sig/config.hpp"
#include "sig/io.hpp"
#include "sig/report.hpp"
#include "sig/srd.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFrameErrors = 1;
constexpr int kExitConfigError = 2;

struct EvaluateArgs {
    std::string pred_dir, gt_dir, answers_dir, attention_dir, template_dir;
    std::string config_path, out_path;
    bool per_frame = false, human_like = false, skip_bad = false;
    int jobs = 0;  // 0 = use config value
};

int run_evaluate(const EvaluateArgs& args) {
    sig::EvalConfig cfg = sig::load_config(args.config_path);
    if (args.jobs > 0) cfg.jobs = args.jobs;

    sig::CorpusOptions opt;
    opt.pred_dir = args.pred_dir;
    opt.gt_dir = args.gt_dir;
    opt.answers_dir = args.answers_dir;
    opt.attention_dir = args.attention_dir;
    opt.template_dir = args.template_dir;
    opt.human_like = args.human_like;
    opt.per_frame = args.per_frame;
    opt.jobs = cfg.jobs;

    const sig::CorpusResult result = sig::evaluate_corpus(opt, cfg);

    const auto report = sig::corpus_report_json(result, cfg, args.per_frame);
    sig::write_file(args.out_path, report.dump(2) + "\n");
    std::filesystem::path csv_path(args.out_path);
    csv_path.replace_extension(".csv");
    sig::write_file(csv_path, sig::corpus_report_csv(result));

    if (result.error_count > 0) {
        std::fprintf(stderr, "sig-eval: %d frame(s) failed\n", result.error_count);
        for (const sig::FrameOutcome& f : result.frames)
            if (!f.ok) std::fprintf(stderr, "  %s: %s\n", f.stem.c_str(), f.error.c_str());
        if (!args.skip_bad) return kExitFrameErrors;
    }
    std::printf("report written to %s (%d frames scored, %d errors)\n", args.out_path.c_str(),
                result.aggregate.frames, result.error_count);
    return kExitOk;
}

int run_derive_srp(const std::string& sig_path, const std::string& out_prefix,
                   const std::string& config_path) {
    const sig::EvalConfig cfg = sig::load_config(config_path);
    const sig::SigScene scene = sig::parse_sig(sig::read_file(sig_path), cfg.ontology);
    const sig::SrpDerivation srp = sig::derive_srp(scene, cfg.ontology, cfg.proximal);

    nlohmann::ordered_json tmpl;
    tmpl["num_placeholders"] = srp.tmpl.pairs.size();
    tmpl["pairs"] = nlohmann::ordered_json::array();
    for (const sig::SrpPair& p : srp.tmpl.pairs)
        tmpl["pairs"].push_back(
            {{"a", p.a}, {"b", p.b}, {"degenerate_direction", p.degenerate_direction}});
    tmpl["template_directional"] = srp.tmpl.directional_paragraph();
    tmpl["template_proximal"] = srp.tmpl.proximal_paragraph();

    nlohmann::ordered_json answers;
    answers["answers_directional"] = srp.directional;
    answers["answers_proximal"] = srp.proximal;

    sig::write_file(out_prefix + "_template.json", tmpl.dump(2) + "\n");
    sig::write_file(out_prefix + "_answers.json", answers.dump(2) + "\n");
    std::printf("wrote %s_template.json and %s_answers.json (%zu pairs)\n", out_prefix.c_str(),
                out_prefix.c_str(), srp.tmpl.pairs.size());
    return kExitOk;
}

struct AttentionBuildArgs {
    std::string trace_path, camera_path, out_path, config_path;
    double radius = 0.0;
    int width = 0, height = 0;
};

int run_attention_build(const AttentionBuildArgs& args) {
    const sig::EvalConfig cfg = sig::load_config(args.config_path);
    double radius = args.radius;
    int width = args.width, height = args.height;
    if (!args.camera_path.empty()) {
        nlohmann::json cam_doc = nlohmann::json::parse(sig::read_file(args.camera_path), nullptr, false);
        if (cam_doc.is_discarded() || !cam_doc.is_object())
            sig::fail(sig::errc::config_error, "camera spec must be a JSON object");
        sig::CameraSpec cam;
        try {
            cam.focal_mm = cam_doc.at("focal_mm").get<double>();
            cam.image_w = cam_doc.at("image_w").get<double>();
            cam.image_h = cam_doc.at("image_h").get<double>();
            cam.sensor_w_mm = cam_doc.at("sensor_w_mm").get<double>();
            cam.sensor_h_mm = cam_doc.at("sensor_h_mm").get<double>();
            cam.fov_w_deg = cam_doc.at("fov_w_deg").get<double>();
            cam.fov_h_deg = cam_doc.at("fov_h_deg").get<double>();
        } catch (const nlohmann::json::exception& e) {
            sig::fail(sig::errc::config_error, std::string("camera spec: ") + e.what());
        }
        radius = sig::attention_radius(cam);
        if (width == 0) width = static_cast<int>(cam.image_w);
        if (height == 0) height = static_cast<int>(cam.image_h);
    }
    if (radius <= 0.0)
        sig::fail(sig::errc::config_error, "need --camera or a positive --radius");
    if (width <= 0 || height <= 0)
        sig::fail(sig::errc::config_error, "need a positive --width and --height");

    const auto samples = sig::read_gaze_trace(args.trace_path);
    int used = 0;
    const sig::AttentionMap map =
        sig::accumulate_gaze(samples, radius, width, height, cfg.gaze_kernel, &used);
    if (used == 0)
        std::fprintf(stderr, "sig-eval: warning: no usable gaze samples, writing a zero map\n");
    sig::write_attention_map(args.out_path, map);
    std::printf("wrote %s (%dx%d, radius %.2f px, %d samples)\n", args.out_path.c_str(), width,
                height, radius, used);
    return kExitOk;
}

int run_attention_project(const std::string& map_path, const std::string& homography_path,
                          const std::string& out_path) {
    const sig::AttentionMap map = sig::read_attention_map(map_path);
    std::vector<sig::Correspondence> corr;
    if (!homography_path.empty()) {
        corr = sig::read_homography_config(homography_path);
    } else {
        corr = sig::default_corner_correspondences(map.width, map.height);
        std::fprintf(stderr,
                     "sig-eval: note: no calibration given, mapping image corners to grid corners\n");
    }
    const sig::Homography h = sig::estimate_homography(corr);
    const sig::AttentionGrid grid = sig::project_attention(map, h);
    sig::write_attention_grid(out_path, grid);
    std::printf("wrote %s\n", out_path.c_str());
    return kExitOk;
}

int run_gaze_metrics(const std::string& pred_path, const std::string& gt_path,
                     const std::string& baseline_path, const std::string& out_path,
                     const std::string& config_path) {
    const sig::EvalConfig cfg = sig::load_config(config_path);
    const sig::AttentionMap pred = sig::read_attention_map(pred_path);
    const sig::AttentionMap gt = sig::read_attention_map(gt_path);
    std::optional<sig::AttentionMap> baseline;
    std::string resolved_baseline = baseline_path.empty() ? cfg.baseline_map : baseline_path;
    if (!resolved_baseline.empty()) baseline = sig::read_attention_map(resolved_baseline);

    const sig::GazeMetrics m =
        sig::gaze_metrics(pred, gt, baseline ? &*baseline : nullptr, cfg.smoothing_eps);
    nlohmann::ordered_json j = {{"pcc", m.pcc},
                                {"kl_divergence", m.kl_divergence},
                                {"information_gain", m.information_gain}};
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        sig::write_file(out_path, text);
    return kExitOk;
}

int run_bench_cmd(const std::string& counts_csv, int reps, std::uint64_t seed,
                  const std::string& out_path, const std::string& config_path) {
    const sig::EvalConfig cfg = sig::load_config(config_path);
    sig::BenchOptions opt;
    opt.reps = reps;
    opt.seed = seed;
    if (!counts_csv.empty()) {
        opt.counts.clear();
        std::string token;
        for (char c : counts_csv + ",") {
            if (c == ',') {
                if (!token.empty()) {
                    try {
                        opt.counts.push_back(std::stoi(token));
                    } catch (const std::exception&) {
                        sig::fail(sig::errc::config_error, "--counts must be a comma-separated int list");
                    }
                    token.clear();
                }
            } else {
                token.push_back(c);
            }
        }
        if (opt.counts.empty())
            sig::fail(sig::errc::config_error, "--counts must name at least one object count");
    }
    const auto rows = sig::run_bench(opt, cfg);
    std::fputs(sig::bench_table(rows).c_str(), stdout);
    if (!out_path.empty()) sig::write_file(out_path, sig::bench_json(rows).dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SIG scene evaluation toolkit"};
    app.require_subcommand(1);

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Score predicted SIG frames against ground truth");
    evaluate->add_option("--pred", ev.pred_dir, "Directory of predicted SIG JSON files")->required();
    evaluate->add_option("--gt", ev.gt_dir, "Directory of ground-truth SIG JSON files")->required();
    evaluate->add_option("--srp-answers", ev.answers_dir, "Directory of SRP answer files");
    evaluate->add_option("--attention-dir", ev.attention_dir, "Directory of 10x10 attention grids");
    evaluate->add_option("--template-dir", ev.template_dir, "Directory of SRP template overrides");
    evaluate->add_option("--config", ev.config_path, "Evaluation config JSON");
    evaluate->add_option("--out", ev.out_path, "Report JSON path (CSV twin written alongside)")->required();
    evaluate->add_flag("--per-frame", ev.per_frame, "Embed per-frame metric blocks in the report");
    evaluate->add_flag("--human-like", ev.human_like, "Also compute attention-weighted metrics");
    evaluate->add_flag("--skip-bad", ev.skip_bad, "Exit 0 even when some frames fail");
    evaluate->add_option("--jobs", ev.jobs, "Worker threads (default from config)");

    std::string srp_sig, srp_prefix = "srp", srp_config;
    auto* derive = app.add_subcommand("derive-srp", "Emit the SRP template and GT answers for one scene");
    derive->add_option("--sig", srp_sig, "SIG JSON file")->required();
    derive->add_option("--out-prefix", srp_prefix, "Output file prefix");
    derive->add_option("--config", srp_config, "Evaluation config JSON");

    auto* attention = app.add_subcommand("attention", "Gaze-to-grid attention pipeline");
    attention->require_subcommand(1);
    AttentionBuildArgs ab;
    auto* build = attention->add_subcommand("build", "Accumulate a gaze trace into an attention map");
    build->add_option("--trace", ab.trace_path, "Gaze CSV (header frame,x,y)")->required();
    build->add_option("--camera", ab.camera_path, "Camera spec JSON (sets the radius)");
    build->add_option("--radius", ab.radius, "Attention radius in pixels (overrides --camera)");
    build->add_option("--width", ab.width, "Map width in pixels");
    build->add_option("--height", ab.height, "Map height in pixels");
    build->add_option("--config", ab.config_path, "Evaluation config JSON");
    build->add_option("--out", ab.out_path, "Output attention map file")->required();

    std::string proj_map, proj_h, proj_out;
    auto* project = attention->add_subcommand("project", "Project an attention map onto the 10x10 grid");
    project->add_option("--map", proj_map, "Attention map file")->required();
    project->add_option("--homography", proj_h, "Correspondence config JSON");
    project->add_option("--out", proj_out, "Output grid file")->required();

    std::string gm_pred, gm_gt, gm_baseline, gm_out, gm_config;
    auto* gaze = app.add_subcommand("gaze-metrics", "PCC / KL divergence / IG between attention maps");
    gaze->add_option("--pred", gm_pred, "Predicted attention map")->required();
    gaze->add_option("--gt", gm_gt, "Ground-truth attention map")->required();
    gaze->add_option("--baseline", gm_baseline, "Baseline map for IG (default uniform)");
    gaze->add_option("--out", gm_out, "Output JSON path (default stdout)");
    gaze->add_option("--config", gm_config, "Evaluation config JSON");

    std::string bench_counts, bench_out, bench_config;
    int bench_reps = 1000;
    std::uint64_t bench_seed = 42;
    auto* bench = app.add_subcommand("bench", "Per-frame metric timings on synthetic scenes");
    bench->add_option("--counts", bench_counts, "Comma-separated object counts (default 3,5,...,22)");
    bench->add_option("--reps", bench_reps, "Repetitions per count");
    bench->add_option("--seed", bench_seed, "Scene generator seed");
    bench->add_option("--out", bench_out, "Optional JSON output path");
    bench->add_option("--config", bench_config, "Evaluation config JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (evaluate->parsed()) return run_evaluate(ev);
        if (derive->parsed()) return run_derive_srp(srp_sig, srp_prefix, srp_config);
        if (attention->parsed()) {
            if (build->parsed()) return run_attention_build(ab);
            if (project->parsed()) return run_attention_project(proj_map, proj_h, proj_out);
        }
        if (gaze->parsed()) return run_gaze_metrics(gm_pred, gm_gt, gm_baseline, gm_out, gm_config);
        if (bench->parsed())
            return run_bench_cmd(bench_counts, bench_reps, bench_seed, bench_out, bench_config);
    } catch (const sig::Error& e) {
        std::fprintf(stderr, "sig-eval: %s\n", e.what());
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "sig-eval: %s\n", e.what());
        return kExitConfigError;
    }
    return kExitConfigError;
}
