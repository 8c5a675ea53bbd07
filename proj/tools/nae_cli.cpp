// Command-line front end: synth | train | refine | eval | sweep.
// All randomness is keyed by --seed; data artifacts carry no timestamps, so
// any command rerun with the same flags writes byte-identical files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nae/annotation_io.hpp"
#include "nae/errors.hpp"
#include "nae/eval/metrics.hpp"
#include "nae/nn/checkpoint.hpp"
#include "nae/pipeline.hpp"
#include "nae/synth/scene.hpp"
#include "nae/text.hpp"
#include "nae/train/trainer.hpp"
#include "nae/vector_field.hpp"

namespace {

struct GlobalFlags {
    uint64_t seed = 0;
    int threads = 1;
    bool verbose = false;
};

struct SceneFlags {
    nae::SceneSpec spec;
    int n_scenes = 50;
    double beta = 0.4;
    std::string blob = "gaussian";
    std::string layout = "uniform";

    nae::SceneSpec resolved() const {
        nae::SceneSpec s = spec;
        s.blob = nae::blob_kind_from_string(blob);
        s.layout = nae::layout_mode_from_string(layout);
        s.validate();
        return s;
    }
};

void add_scene_flags(CLI::App* cmd, SceneFlags& f) {
    cmd->add_option("--n", f.n_scenes, "Number of scenes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--beta", f.beta, "Annotation jitter as a fraction of nearest-neighbor distance")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--image-width", f.spec.width, "Scene width in pixels")->capture_default_str();
    cmd->add_option("--image-height", f.spec.height, "Scene height in pixels")->capture_default_str();
    cmd->add_option("--min-count", f.spec.min_count, "Minimum objects per scene")->capture_default_str();
    cmd->add_option("--max-count", f.spec.max_count, "Maximum objects per scene")->capture_default_str();
    cmd->add_option("--blob", f.blob, "Object appearance: gaussian or disc")->capture_default_str();
    cmd->add_option("--radius", f.spec.radius, "Object radius at the bottom row")->capture_default_str();
    cmd->add_option("--layout", f.layout, "Placement: uniform or perspective")->capture_default_str();
    cmd->add_option("--top-scale", f.spec.top_scale, "Perspective shrink factor at the top row")
        ->capture_default_str();
    cmd->add_option("--min-separation", f.spec.min_separation, "Center separation at the bottom row")
        ->capture_default_str();
    cmd->add_option("--background-noise", f.spec.background_noise, "Sigma of additive pixel noise")
        ->capture_default_str();
}

struct TrainFlags {
    nae::TrainConfig config;
    std::vector<int> widths = {16, 32, 64};
    std::string bound_mode = "perspective";

    TrainFlags() { config.crop_size = 64; }  // matched to the default synth scene size

    nae::ModelConfig model() const {
        nae::ModelConfig m;
        m.widths = widths;
        return m;
    }
    nae::TrainConfig resolved(const GlobalFlags& g) const {
        nae::TrainConfig c = config;
        c.bound_mode = nae::bound_mode_from_string(bound_mode);
        c.seed = g.seed;
        c.validate(model());
        return c;
    }
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
    cmd->add_option("--widths", f.widths, "Channel widths per encoder stage")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--lr", f.config.learning_rate, "Learning rate")->capture_default_str();
    cmd->add_option("--weight-decay", f.config.weight_decay, "Decoupled weight decay")
        ->capture_default_str();
    cmd->add_option("--epochs", f.config.epochs, "Training epochs")->capture_default_str();
    cmd->add_option("--batch-size", f.config.batch_size, "Images per optimizer step")
        ->capture_default_str();
    cmd->add_option("--crop", f.config.crop_size, "Square crop size fed to the model")
        ->capture_default_str();
    cmd->add_option("--scale-min", f.config.scale_min, "Lower bound of the random rescale")
        ->capture_default_str();
    cmd->add_option("--scale-max", f.config.scale_max, "Upper bound of the random rescale")
        ->capture_default_str();
    cmd->add_option("--flip-prob", f.config.flip_prob, "Horizontal flip probability")
        ->capture_default_str();
    cmd->add_option("--alpha", f.config.alpha, "Noise radius as a fraction of the local bound")
        ->capture_default_str();
    cmd->add_option("--bound-mode", f.bound_mode, "Noise bound: perspective or constant")
        ->capture_default_str();
    cmd->add_flag("--allow-overlap", f.config.allow_overlap,
                  "Permit alpha > 0.5 (overlapping sampling regions)");
    cmd->add_option("--holdout-fraction", f.config.holdout_fraction,
                    "Dataset fraction reserved for the per-epoch restoration metric")
        ->capture_default_str();
}

nae::EpochLogger make_logger(const GlobalFlags& g) {
    if (!g.verbose) return {};
    return [](const nae::EpochMetrics& m) {
        std::cerr << "epoch " << m.epoch << " loss " << m.mean_loss << " holdout "
                  << m.holdout_err_px << "px steps " << m.steps << " skipped " << m.skipped_steps
                  << "\n";
    };
}

void check_ablation_alphas(const std::vector<double>& alphas, bool allow_overlap) {
    for (const double a : alphas) {
        if (a > 0.5 && !allow_overlap) {
            throw nae::ConfigError("alpha " + std::to_string(a) +
                                   " produces overlapping sampling regions; "
                                   "pass --allow-overlap to permit it");
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthesizes noisy point-annotated scenes, trains an offset-field model, "
                 "and restores annotations toward their true positions"};
    app.require_subcommand(1);
    app.set_config("--config")->description("key = value file (# comments); flags override it");
    app.allow_config_extras(false);

    GlobalFlags global;
    app.add_option("--seed", global.seed, "Master RNG seed")->capture_default_str();
    app.add_option("--threads", global.threads, "Worker threads for generation and inference")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_flag("--verbose", global.verbose, "Progress logging to stderr");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a scene dataset with jittered annotations");
    synth->fallthrough();
    SceneFlags synth_scene;
    std::string synth_out;
    synth->add_option("--out", synth_out, "Output dataset directory")->required();
    add_scene_flags(synth, synth_scene);
    synth->callback([&] {
        const nae::DatasetManifest manifest = nae::emit_dataset(
            synth_scene.n_scenes, synth_scene.resolved(), synth_scene.beta, synth_out, global.seed);
        if (global.verbose) {
            std::cerr << "wrote " << manifest.n_scenes << " scenes to " << synth_out << "\n";
        }
    });

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the offset-field model on a dataset");
    train_cmd->fallthrough();
    TrainFlags train_flags;
    std::string train_data, train_out, train_metrics;
    train_cmd->add_option("--data", train_data, "Dataset directory (from synth)")->required();
    train_cmd->add_option("--out", train_out, "Checkpoint output path")->required();
    train_cmd->add_option("--metrics-out", train_metrics, "Per-epoch metrics CSV path");
    add_train_flags(train_cmd, train_flags);
    train_cmd->callback([&] {
        const std::vector<nae::SceneSample> scenes = nae::load_dataset(train_data);
        const nae::TrainResult result =
            nae::train(nae::to_train_samples(scenes), train_flags.model(),
                       train_flags.resolved(global), make_logger(global));
        nae::save_checkpoint_file(result.state.net, train_out);
        if (!train_metrics.empty()) {
            std::ofstream out(train_metrics, std::ios::binary | std::ios::trunc);
            if (!out) throw nae::IoError(train_metrics, "cannot open for writing");
            out << "epoch,mean_loss,holdout_restore_err_px\n";
            for (const nae::EpochMetrics& m : result.history) {
                out << m.epoch << "," << nae::format_double(m.mean_loss) << ","
                    << nae::format_double(m.holdout_err_px) << "\n";
            }
        }
        if (global.verbose) std::cerr << "wrote checkpoint " << train_out << "\n";
    });

    // refine
    auto* refine = app.add_subcommand("refine", "Move annotations by the model's predicted offsets");
    refine->fallthrough();
    std::string refine_ckpt, refine_image, refine_ann, refine_out, refine_field;
    refine->add_option("--checkpoint", refine_ckpt, "Trained model checkpoint")->required();
    refine->add_option("--image", refine_image, "PGM image the annotations belong to")->required();
    refine->add_option("--annotations", refine_ann, "Annotation JSON to refine")->required();
    refine->add_option("--out", refine_out, "Refined annotation JSON path")->required();
    refine->add_option("--field-out", refine_field, "Also write the predicted field (binary)");
    refine->callback([&] {
        const nae::UNet net = nae::load_checkpoint_file(refine_ckpt);
        const nae::ImageGrid image = nae::read_pgm_file(refine_image);
        nae::AnnotationFile ann = nae::read_annotations_file(refine_ann);
        if (ann.width != image.width || ann.height != image.height) {
            throw nae::ParseError(refine_ann, 0, "annotation size does not match the image");
        }
        const nae::VectorField field = nae::infer_field(net, image);
        const nae::PointSet refined =
            nae::restore(nae::PointSet{ann.points, {}}, field);
        ann.points = refined.points;
        nae::write_annotations_file(ann, refine_out);
        if (!refine_field.empty()) nae::write_field_file(field, refine_field);
    });

    // eval
    auto* eval_cmd = app.add_subcommand(
        "eval", "Score stored vs model-refined annotations against ground truth");
    eval_cmd->fallthrough();
    std::string eval_data, eval_ckpt, eval_csv, eval_json, eval_match = "indexed";
    double eval_alpha = 0.0;
    eval_cmd->add_option("--data", eval_data, "Dataset directory (needs ground truth)")->required();
    eval_cmd->add_option("--checkpoint", eval_ckpt, "Trained model checkpoint")->required();
    eval_cmd->add_option("--match", eval_match, "Point matching: indexed or nn_match")
        ->capture_default_str();
    eval_cmd->add_option("--alpha", eval_alpha, "Alpha label recorded in the report row")
        ->capture_default_str();
    eval_cmd->add_option("--out-csv", eval_csv, "Report CSV path (also printed to stdout)");
    eval_cmd->add_option("--out-json", eval_json, "Report JSON path");
    eval_cmd->callback([&] {
        const std::vector<nae::SceneSample> scenes = nae::load_dataset(eval_data);
        const nae::DatasetManifest manifest = nae::read_manifest_file(
            (std::filesystem::path(eval_data) / "manifest.json").string());
        const nae::UNet net = nae::load_checkpoint_file(eval_ckpt);
        const nae::RestorationMetrics metrics = nae::evaluate_scenes(
            net, scenes, nae::match_mode_from_string(eval_match), global.threads);
        const std::vector<nae::ReportRow> rows = {{manifest.beta, eval_alpha, metrics, ""}};
        std::cout << nae::write_report_csv(rows);
        if (!eval_csv.empty() || !eval_json.empty()) {
            nae::write_report_files(rows, eval_csv.empty() ? "report.csv" : eval_csv,
                                    eval_json.empty() ? "report.json" : eval_json);
        }
    });

    // sweep
    auto* sweep = app.add_subcommand(
        "sweep", "Generate/train/evaluate across noise levels or sampling bounds");
    sweep->fallthrough();
    SceneFlags sweep_scene;
    TrainFlags sweep_train;
    std::string sweep_kind, sweep_csv, sweep_json, sweep_match = "indexed";
    std::vector<double> sweep_betas = {0.2, 0.4, 0.6, 0.8};
    std::vector<double> sweep_alphas = {0.3, 0.4, 0.5, 0.6};
    sweep->add_option("--kind", sweep_kind, "robustness (over beta) or alpha (over the bound)")
        ->required()
        ->check(CLI::IsMember({"robustness", "alpha"}));
    sweep->add_option("--out-csv", sweep_csv, "Report CSV path")->required();
    sweep->add_option("--out-json", sweep_json, "Report JSON path");
    sweep->add_option("--betas", sweep_betas, "Noise levels for the robustness sweep")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--alphas", sweep_alphas, "Bounds for the alpha ablation")
        ->delimiter(',')
        ->capture_default_str();
    sweep->add_option("--match", sweep_match, "Point matching: indexed or nn_match")
        ->capture_default_str();
    add_scene_flags(sweep, sweep_scene);
    add_train_flags(sweep, sweep_train);
    sweep->callback([&] {
        nae::PipelineConfig cfg;
        cfg.scene = sweep_scene.resolved();
        cfg.n_scenes = sweep_scene.n_scenes;
        cfg.model = sweep_train.model();
        cfg.train = sweep_train.resolved(global);
        cfg.mode = nae::match_mode_from_string(sweep_match);
        cfg.threads = global.threads;
        cfg.log = make_logger(global);
        const nae::SweepDriver driver = nae::make_pipeline_driver(cfg);
        std::vector<nae::ReportRow> rows;
        if (sweep_kind == "robustness") {
            rows = nae::robustness_sweep(sweep_betas, cfg.train.alpha, driver);
        } else {
            check_ablation_alphas(sweep_alphas, cfg.train.allow_overlap);
            rows = nae::alpha_ablation(sweep_alphas, sweep_scene.beta, driver);
        }
        nae::write_report_files(rows, sweep_csv,
                                sweep_json.empty() ? sweep_csv + ".json" : sweep_json);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const nae::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nae::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nae::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
