#include <doctest.h>

#include <filesystem>
#include <random>

#include "sig/bench.hpp"
#include "sig/config.hpp"
#include "sig/report.hpp"
#include "sig/synthetic.hpp"

using namespace sig;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / ("sig_test_" + name + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_scene(const fs::path& dir, const std::string& stem, const SigScene& scene) {
    write_file(dir / (stem + ".json"), serialize_sig(scene));
}

}  // namespace

TEST_CASE("config round trips through JSON") {
    EvalConfig cfg;
    cfg.match_weights.color = 0.25;
    cfg.mlsm.thresholds = {0.5, 1.0, 2.0};
    cfg.mlsm.aggregation = MlsmConfig::Aggregation::uniform;
    cfg.ged.beta = 0.75;
    cfg.proximal.edges = {1.0, 2.0, 3.0, 4.0};
    cfg.smoothing_eps = 1e-6;
    cfg.gaze_kernel = StampKernel::gaussian;
    cfg.corpus_aggregation = EvalConfig::CorpusAggregation::object_weighted;
    cfg.jobs = 3;
    cfg.ontology.include_lanes = true;

    const EvalConfig back = config_from_json(config_to_json(cfg));
    CHECK(back.match_weights.color == cfg.match_weights.color);
    CHECK(back.mlsm.thresholds == cfg.mlsm.thresholds);
    CHECK(back.mlsm.aggregation == cfg.mlsm.aggregation);
    CHECK(back.ged.beta == cfg.ged.beta);
    CHECK(back.proximal.edges == cfg.proximal.edges);
    CHECK(back.smoothing_eps == cfg.smoothing_eps);
    CHECK(back.gaze_kernel == cfg.gaze_kernel);
    CHECK(back.corpus_aggregation == cfg.corpus_aggregation);
    CHECK(back.jobs == cfg.jobs);
    CHECK(back.ontology.include_lanes);
}

TEST_CASE("config rejects unknown keys and bad values") {
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"bogus":1})")), Error);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"jobs":0})")), Error);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"mlsm":{"thresholds":[2,1]}})")),
                    Error);
    CHECK_THROWS_AS(
        config_from_json(nlohmann::json::parse(R"({"match_weights":{"color":1.5}})")), Error);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"gaze_kernel":"box"})")), Error);
}

TEST_CASE("a custom ontology parses scenes from another domain") {
    EvalConfig cfg = config_from_json(nlohmann::json::parse(R"({
        "ontology": {
            "categories": [
                {"name":"furniture","json_key":"furniture","label":"","schema":"full","in_metrics":true},
                {"name":"windows","json_key":"windows","label":"window","schema":"order_only","in_metrics":true}
            ]
        }
    })"));
    const SigScene scene = parse_sig(
        R"({"furniture":{"black van 1":[2,2]},"windows":{"window 1":[5,5]},"self":[4,0]})",
        cfg.ontology);
    CHECK(scene.categories.size() == 2);
    const FrameMetrics m = evaluate_pair(scene, scene, cfg);
    CHECK(m.mlsm.f1 == 1.0);
    CHECK(m.srgs.s == 1.0);
}

TEST_CASE("categories outside the metric set are parsed but never scored") {
    EvalConfig cfg = config_from_json(nlohmann::json::parse(R"({
        "ontology": {
            "categories": [
                {"name":"vehicles","json_key":"vehicles","label":"","schema":"full","in_metrics":true},
                {"name":"debris","json_key":"debris","label":"item","schema":"order_only","in_metrics":false}
            ]
        }
    })"));
    const SigScene gt = parse_sig(
        R"({"vehicles":{"black car 1":[2,2]},"debris":{"item 1":[5,5]},"self":[4,0]})",
        cfg.ontology);
    SigScene pred = gt;
    pred.categories[1][0].pos = {9.0, 9.0};  // a debris mismatch must not matter

    const FrameMetrics m = evaluate_pair(pred, gt, cfg);
    CHECK(m.mlsm.f1 == 1.0);
    CHECK(m.srgs.s == 1.0);
    CHECK(m.srd.directional.acc == 1.0);
    CHECK(m.srd_total_slots == 1);  // only (black car 1, self)
}

TEST_CASE("evaluate_pair on identical scenes is perfect everywhere") {
    std::mt19937_64 rng(81);
    const EvalConfig cfg;
    for (int trial = 0; trial < 20; ++trial) {
        const SigScene scene = random_scene(rng, trial % 9);
        const FrameMetrics m = evaluate_pair(scene, scene, cfg);
        CHECK(m.mlsm.precision == 1.0);
        CHECK(m.mlsm.recall == 1.0);
        CHECK(m.mlsm.f1 == 1.0);
        CHECK(m.mlsm.assa == 1.0);
        CHECK(m.srgs.s == 1.0);
        CHECK(m.srgs.ws == 1.0);
        CHECK(m.srd.directional.mae == 0.0);
        CHECK(m.srd.directional.acc == 1.0);
        CHECK(m.srd.proximal.mse == 0.0);
        CHECK(m.srd_covered_slots == m.srd_total_slots);
        CHECK_FALSE(m.srd_from_answers);
    }
}

TEST_CASE("evaluate_pair scores supplied answers instead of derived labels") {
    const SigScene gt = parse_sig(
        R"({"vehicles":{"black car 1":[2,2]},"traffic_signs":{"sign 1":[6,6]},"self":[4,0]})");
    const EvalConfig cfg;
    const SrpDerivation d = derive_srp(gt, cfg.ontology, cfg.proximal);
    SrpAnswers answers;
    answers.directional = d.directional;
    answers.proximal = d.proximal;
    const FrameMetrics perfect = evaluate_pair(gt, gt, cfg, nullptr, &answers);
    CHECK(perfect.srd_from_answers);
    CHECK(perfect.srd.directional.acc == 1.0);
    CHECK(perfect.srd.proximal.acc == 1.0);

    for (int& v : answers.directional) v = antipodal_bin(v);
    const FrameMetrics wrong = evaluate_pair(gt, gt, cfg, nullptr, &answers);
    CHECK(wrong.srd.directional.mae == 4.0);
    CHECK(wrong.srd.directional.acc == 0.0);
    CHECK(wrong.srd.proximal.acc == 1.0);
}

TEST_CASE("derived SRD skips slots whose objects went unmatched") {
    const SigScene gt = parse_sig(
        R"({"vehicles":{"black car 1":[2,2],"white car 2":[7,7]},"self":[4,0]})");
    const SigScene pred = parse_sig(R"({"vehicles":{"black car 1":[2,2]},"self":[4,0]})");
    const EvalConfig cfg;
    const FrameMetrics m = evaluate_pair(pred, gt, cfg);
    CHECK(m.srd_total_slots == 3);    // C(3,2) over two vehicles + ego
    CHECK(m.srd_covered_slots == 1);  // only (black car 1, self) survives
    CHECK(m.srd.directional.acc == 1.0);
}

TEST_CASE("human-like blocks appear only with an attention grid") {
    const SigScene gt = parse_sig(
        R"({"vehicles":{"black car 1":[2,2],"white car 2":[6,3]},"self":[4,0]})");
    SigScene pred = gt;
    pred.categories[0][1].pos = {6.0, 5.0};
    const EvalConfig cfg;

    const FrameMetrics plain = evaluate_pair(pred, gt, cfg);
    CHECK_FALSE(plain.human.has_value());

    const AttentionGrid flat = AttentionGrid::constant(1.0);
    const FrameMetrics weighted = evaluate_pair(pred, gt, cfg, &flat);
    REQUIRE(weighted.human.has_value());
    // Unit attention reproduces the unweighted numbers exactly.
    CHECK(weighted.human->s == plain.srgs.s);
    CHECK(weighted.human->ws == plain.srgs.ws);
    CHECK(weighted.human->srd.directional.mae == plain.srd.directional.mae);
    CHECK(weighted.human->srd.proximal.mse == plain.srd.proximal.mse);
}

TEST_CASE("human-like SRD weights scale with pair attention") {
    const SigScene gt = parse_sig(
        R"({"vehicles":{"black car 1":[2,2]},"self":[4,0]})");
    const EvalConfig cfg;
    SrpAnswers answers;
    answers.directional = {antipodal_bin(derive_srp(gt).directional[0])};
    answers.proximal = {derive_srp(gt).proximal[0]};

    AttentionGrid attn = AttentionGrid::constant(0.0);
    attn.at(2, 2) = 0.6;  // black car 1
    attn.at(4, 0) = 0.2;  // ego
    const FrameMetrics m = evaluate_pair(gt, gt, cfg, &attn, &answers);
    REQUIRE(m.human.has_value());
    // Distance 4 scaled by mean attention 0.4.
    CHECK(m.human->srd.directional.mae == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(m.srd.directional.mae == 4.0);
}

TEST_CASE("template overrides reorder and reverse pairs consistently") {
    const SigScene gt = parse_sig(
        R"({"vehicles":{"black car 1":[2,2]},"traffic_signs":{"sign 1":[6,6]},"self":[4,0]})");
    const EvalConfig cfg;
    const nlohmann::json tmpl = nlohmann::json::parse(R"({
        "pairs": [
            {"a": "self", "b": "black car 1"},
            {"a": "sign 1", "b": "black car 1"}
        ]
    })");
    const SrpDerivation plain = derive_srp(gt, cfg.ontology, cfg.proximal);
    const auto objects = canonical_objects(gt, cfg.ontology);
    const SrpDerivation overridden =
        sig::detail::apply_template_override(plain, objects, tmpl);
    REQUIRE(overridden.tmpl.pairs.size() == 2);
    CHECK(overridden.tmpl.pairs[0].a == "self");
    CHECK(overridden.tmpl.pairs[0].b == "black car 1");
    // Reversed pair carries the antipodal directional label.
    const int forward = plain.directional[1];  // (black car 1, self)
    CHECK(overridden.directional[0] == antipodal_bin(forward));
    CHECK(overridden.proximal[0] == plain.proximal[1]);

    const nlohmann::json bad = nlohmann::json::parse(R"({"pairs":[{"a":"ghost 1","b":"self"}]})");
    CHECK_THROWS_AS(sig::detail::apply_template_override(plain, objects, bad), Error);
}

TEST_CASE("corpus evaluation pairs frames by stem and aggregates means") {
    TempDir pred_dir("pred"), gt_dir("gt");
    std::mt19937_64 rng(82);

    constexpr int kFrames = 10;
    std::vector<SigScene> gts, preds;
    for (int i = 0; i < kFrames; ++i) {
        const SigScene gt = random_scene(rng, 5);
        const SigScene pred = i % 2 == 0 ? gt : perturb_scene(rng, gt);
        const std::string stem = "frame_" + std::to_string(i);
        write_scene(gt_dir.path, stem, gt);
        write_scene(pred_dir.path, stem, pred);
        gts.push_back(gt);
        preds.push_back(pred);
    }

    CorpusOptions opt;
    opt.pred_dir = pred_dir.path;
    opt.gt_dir = gt_dir.path;
    const EvalConfig cfg;
    const CorpusResult result = evaluate_corpus(opt, cfg);
    CHECK(result.error_count == 0);
    REQUIRE(result.frames.size() == kFrames);

    double f1_sum = 0.0, s_sum = 0.0, dir_mae_sum = 0.0;
    for (int i = 0; i < kFrames; ++i) {
        const FrameMetrics direct = evaluate_pair(preds[i], gts[i], cfg);
        CHECK(result.frames[i].metrics.mlsm.f1 == direct.mlsm.f1);
        CHECK(result.frames[i].metrics.srgs.s == direct.srgs.s);
        f1_sum += direct.mlsm.f1;
        s_sum += direct.srgs.s;
        dir_mae_sum += direct.srd.directional.mae;
    }
    CHECK(result.aggregate.mlsm_f1 == doctest::Approx(f1_sum / kFrames).epsilon(1e-12));
    CHECK(result.aggregate.srgs_s == doctest::Approx(s_sum / kFrames).epsilon(1e-12));
    CHECK(result.aggregate.srd_dir.mae == doctest::Approx(dir_mae_sum / kFrames).epsilon(1e-12));
}

TEST_CASE("corpus reports are byte-identical for any job count") {
    TempDir pred_dir("pred_jobs"), gt_dir("gt_jobs"), attn_dir("attn_jobs"), ans_dir("ans_jobs");
    std::mt19937_64 rng(83);
    std::uniform_real_distribution<double> level(0.0, 1.0);
    std::uniform_int_distribution<int> dir(0, 7);
    std::uniform_int_distribution<int> prox(0, 4);
    const EvalConfig cfg;
    for (int i = 0; i < 8; ++i) {
        const SigScene gt = random_scene(rng, 6);
        const SigScene pred = perturb_scene(rng, gt);
        const std::string stem = "f" + std::to_string(i);
        write_scene(gt_dir.path, stem, gt);
        write_scene(pred_dir.path, stem, pred);

        AttentionGrid grid;
        for (double& v : grid.values) v = level(rng);
        write_attention_grid(attn_dir.path / (stem + ".txt"), grid);

        const SrpDerivation d = derive_srp(gt, cfg.ontology, cfg.proximal);
        nlohmann::ordered_json answers;
        answers["answers_directional"] = nlohmann::ordered_json::array();
        answers["answers_proximal"] = nlohmann::ordered_json::array();
        for (size_t s = 0; s < d.tmpl.pairs.size(); ++s) {
            answers["answers_directional"].push_back(dir(rng));
            answers["answers_proximal"].push_back(prox(rng));
        }
        write_file(ans_dir.path / (stem + ".json"), answers.dump());
    }
    CorpusOptions opt;
    opt.pred_dir = pred_dir.path;
    opt.gt_dir = gt_dir.path;
    opt.attention_dir = attn_dir.path;
    opt.answers_dir = ans_dir.path;
    opt.human_like = true;

    opt.jobs = 1;
    const std::string one = corpus_report_json(evaluate_corpus(opt, cfg), cfg, true).dump();
    opt.jobs = 4;
    const std::string four = corpus_report_json(evaluate_corpus(opt, cfg), cfg, true).dump();
    CHECK(one == four);
    CHECK(one.find("human_like") != std::string::npos);
}

TEST_CASE("object-weighted corpus aggregation follows GT object counts") {
    TempDir pred_dir("pred_w"), gt_dir("gt_w");
    std::mt19937_64 rng(85);

    // Frame big: 8 objects, perfect. Frame tiny: 1 object, fully missed.
    SigScene big;
    do {
        big = random_scene(rng, 8);
    } while (big.object_count() != 8);
    write_scene(gt_dir.path, "big", big);
    write_scene(pred_dir.path, "big", big);

    const SigScene tiny = parse_sig(R"({"vehicles":{"black car 1":[2,2]},"self":[4,0]})");
    const SigScene tiny_pred = parse_sig(R"({"vehicles":{},"self":[4,0]})");
    write_scene(gt_dir.path, "tiny", tiny);
    write_scene(pred_dir.path, "tiny", tiny_pred);

    CorpusOptions opt;
    opt.pred_dir = pred_dir.path;
    opt.gt_dir = gt_dir.path;

    EvalConfig cfg;
    const CorpusResult frame_mean = evaluate_corpus(opt, cfg);
    CHECK(frame_mean.aggregate.mlsm_f1 == doctest::Approx(0.5).epsilon(1e-12));

    cfg.corpus_aggregation = EvalConfig::CorpusAggregation::object_weighted;
    const CorpusResult weighted = evaluate_corpus(opt, cfg);
    CHECK(weighted.aggregate.mlsm_f1 == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("missing predictions land in the errors block") {
    TempDir pred_dir("pred_missing"), gt_dir("gt_missing");
    std::mt19937_64 rng(84);
    write_scene(gt_dir.path, "a", random_scene(rng, 3));
    write_scene(gt_dir.path, "b", random_scene(rng, 3));
    write_scene(pred_dir.path, "a", random_scene(rng, 3));
    write_scene(pred_dir.path, "zz_extra", random_scene(rng, 2));
    write_file(pred_dir.path / "c.txt", "not a frame");

    CorpusOptions opt;
    opt.pred_dir = pred_dir.path;
    opt.gt_dir = gt_dir.path;
    const EvalConfig cfg;
    const CorpusResult result = evaluate_corpus(opt, cfg);
    CHECK(result.error_count == 2);  // missing 'b' prediction + orphan 'zz_extra'
    CHECK(result.aggregate.frames == 1);

    const auto report = corpus_report_json(result, cfg, false);
    CHECK(report["errors"].size() == 2);
}

TEST_CASE("bench produces positive, well-formed rows even at count 1") {
    BenchOptions opt;
    opt.counts = {1, 4};
    opt.reps = 20;
    const auto rows = run_bench(opt, EvalConfig{});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].count == 1);
    for (const BenchRow& r : rows) {
        CHECK(r.mlsm_seconds > 0.0);
        CHECK(r.srgs_seconds > 0.0);
        CHECK(r.srd_seconds >= 0.0);
    }
    const std::string table = bench_table(rows);
    CHECK(table.find("MLSM") != std::string::npos);
    CHECK(table.find("SRGS") != std::string::npos);
    CHECK(table.find("SRD") != std::string::npos);
}

TEST_CASE("lane-inclusive configs fold lanes into the metrics") {
    EvalConfig cfg;
    cfg.ontology.include_lanes = true;
    const std::string text =
        R"({"vehicles":{},"traffic_lanes":{"lane 1":[[3,0],[3,5]],"lane 2":[[5,0],[5,5]]},)"
        R"("traffic_signs":{},"traffic_lights":{},"self":[4,0]})";
    const SigScene gt = parse_sig(text, cfg.ontology);
    const FrameMetrics self_eval = evaluate_pair(gt, gt, cfg);
    CHECK(self_eval.mlsm.f1 == 1.0);
    CHECK(self_eval.srgs.s == 1.0);

    SigScene pred = gt;
    pred.lanes.pop_back();
    const FrameMetrics degraded = evaluate_pair(pred, gt, cfg);
    CHECK(degraded.mlsm.f1 < 1.0);
    CHECK(degraded.srgs.s < 1.0);

    // Default config ignores lanes entirely.
    EvalConfig plain;
    const SigScene gt_plain = parse_sig(text, plain.ontology);
    SigScene pred_plain = gt_plain;
    pred_plain.lanes.pop_back();
    const FrameMetrics ignored = evaluate_pair(pred_plain, gt_plain, plain);
    CHECK(ignored.mlsm.f1 == 1.0);
    CHECK(ignored.srgs.s == 1.0);
}
