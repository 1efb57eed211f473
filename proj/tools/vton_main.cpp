// Command-line front end: each subcommand exposes one pipeline stage, and
// `tryon` chains them end to end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vton/compose.hpp"
#include "vton/glitch.hpp"
#include "vton/landmarks.hpp"
#include "vton/metrics.hpp"
#include "vton/pipeline.hpp"
#include "vton/predictor.hpp"
#include "vton/rng.hpp"
#include "vton/tps.hpp"
#include "vton/warp.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    double lambda = vton::kDefaultTpsLambda;
    double variance = 0.001;
    int window = 3;
    int dilate = 3;
    std::uint64_t seed = 0;
    std::string out;
    std::vector<int> cloth_labels = {5};
    std::vector<int> agnostic_labels = {5, 14, 15};
};

/// JSON config file: keys lambda, variance, window, dilate, seed, out,
/// cloth_labels, agnostic_labels. Explicit flags override file values.
void apply_config_file(const std::string& path, CommonOpts& o) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("lambda")) o.lambda = j["lambda"].get<double>();
    if (j.contains("variance")) o.variance = j["variance"].get<double>();
    if (j.contains("window")) o.window = j["window"].get<int>();
    if (j.contains("dilate")) o.dilate = j["dilate"].get<int>();
    if (j.contains("seed")) o.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) o.out = j["out"].get<std::string>();
    if (j.contains("cloth_labels")) o.cloth_labels = j["cloth_labels"].get<std::vector<int>>();
    if (j.contains("agnostic_labels"))
        o.agnostic_labels = j["agnostic_labels"].get<std::vector<int>>();
}

std::string resolve_out(const std::string& out, const char* subcommand) {
    if (!out.empty()) return out;
    if (const char* root = std::getenv("VTON_OUT_ROOT"))
        return (fs::path(root) / subcommand).string();
    throw std::runtime_error("no output path: pass --out or set VTON_OUT_ROOT");
}

vton::LandmarkAnnotation load_normalized(const std::string& path) {
    vton::LandmarkAnnotation a = vton::load_annotation(path);
    if (a.space == vton::CoordinateSpace::pixel) a = vton::normalize_landmarks(a);
    return a;
}

/// Control pairs from two annotation files. The target garment landmarks
/// come from the person annotation when it carries them, otherwise the
/// model's own are reused (identity targets).
vton::ControlPairs pairs_from_files(const std::string& model_path,
                                    const std::string& person_path) {
    const vton::LandmarkAnnotation model = load_normalized(model_path);
    const vton::LandmarkAnnotation person = load_normalized(person_path);
    std::vector<vton::Landmark> cloth, target;
    if (model.fashion_landmarks) {
        cloth = *model.fashion_landmarks;
        target = person.fashion_landmarks ? *person.fashion_landmarks : cloth;
    }
    return vton::build_control_pairs(model, person, cloth, target);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

int run_metric_dir(const fs::path& dir_a, const fs::path& dir_b, const vton::SsimConfig& cfg,
                   const std::string& out_file) {
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir_a))
        if (entry.path().extension() == ".png") names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());

    nlohmann::json items = nlohmann::json::array();
    double ssim_sum = 0.0;
    for (const auto& name : names) {
        const fs::path pb = dir_b / name;
        if (!fs::exists(pb)) continue;
        const vton::ImageBuffer a = vton::load_png_rgba((dir_a / name).string());
        const vton::ImageBuffer b = vton::load_png_rgba(pb.string());
        nlohmann::json j = nlohmann::json::parse(vton::metric_report_json(a, b, cfg));
        ssim_sum += j["ssim"].get<double>();
        j["name"] = name;
        items.push_back(std::move(j));
    }
    if (items.empty()) throw std::runtime_error("metric: no matching .png pairs found");
    nlohmann::json report;
    report["items"] = std::move(items);
    report["mean_ssim"] = ssim_sum / static_cast<double>(report["items"].size());
    const std::string text = report.dump(2) + "\n";
    std::cout << text;
    if (!out_file.empty()) write_text(out_file, text);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Landmark-guided garment warping and compositing toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string config_file;

    // Registered on every subcommand so `vton <cmd> --config ...` works.
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_file, "JSON config file (flags override it)");
        sub->add_option("--lambda", opts.lambda, "warp regularization weight");
        sub->add_option("--seed", opts.seed, "random seed");
        sub->add_option("--variance", opts.variance, "landmark perturbation variance");
        sub->add_option("--window", opts.window, "structural-similarity window (odd)");
        sub->add_option("--dilate", opts.dilate, "mask dilation radius in pixels");
        sub->add_option("--out", opts.out, "output file or directory");
    };

    // fit-tps
    auto* fit_cmd = app.add_subcommand("fit-tps", "fit a warp from two annotations");
    std::string fit_model, fit_person;
    fit_cmd->add_option("--model", fit_model, "model annotation JSON")->required();
    fit_cmd->add_option("--person", fit_person, "person annotation JSON")->required();
    add_common(fit_cmd);

    // warp
    auto* warp_cmd = app.add_subcommand("warp", "warp an image through fitted control pairs");
    std::string warp_image_path, warp_model, warp_person;
    int warp_w = 0, warp_h = 0;
    warp_cmd->add_option("--image", warp_image_path, "RGBA image to warp")->required();
    warp_cmd->add_option("--model", warp_model, "model annotation JSON")->required();
    warp_cmd->add_option("--person", warp_person, "person annotation JSON")->required();
    warp_cmd->add_option("--width", warp_w, "output width (default: person annotation)");
    warp_cmd->add_option("--height", warp_h, "output height (default: person annotation)");
    add_common(warp_cmd);

    // warp-points
    auto* wp_cmd = app.add_subcommand("warp-points", "forward-transform a list of points");
    std::string wp_points, wp_model, wp_person;
    wp_cmd->add_option("--points", wp_points, "JSON array of [x,y] normalized points")->required();
    wp_cmd->add_option("--model", wp_model, "model annotation JSON")->required();
    wp_cmd->add_option("--person", wp_person, "person annotation JSON")->required();
    add_common(wp_cmd);

    // perturb
    auto* pert_cmd = app.add_subcommand("perturb", "perturb the fashion landmarks of an annotation");
    std::string pert_annotation;
    pert_cmd->add_option("--annotation", pert_annotation, "annotation JSON")->required();
    add_common(pert_cmd);

    // gen-samples
    auto* gen_cmd = app.add_subcommand("gen-samples", "generate self-supervised training samples");
    std::string gen_image, gen_mask, gen_annotation, gen_mode = "mask_gen";
    int gen_count = 1;
    gen_cmd->add_option("--image", gen_image, "model image PNG")->required();
    gen_cmd->add_option("--mask", gen_mask, "binary garment mask PNG")->required();
    gen_cmd->add_option("--annotation", gen_annotation, "model annotation JSON")->required();
    gen_cmd->add_option("--mode", gen_mode, "mask_gen or synth")
        ->check(CLI::IsMember({"mask_gen", "synth"}));
    gen_cmd->add_option("--count", gen_count, "number of samples")->check(CLI::PositiveNumber);
    add_common(gen_cmd);

    // train-predictor
    auto* train_cmd = app.add_subcommand("train-predictor", "train the garment landmark predictor");
    std::string train_dataset, train_losses;
    int train_epochs = 316, train_batch = 64;
    double train_lr = 0.001, train_stop = 0.0;
    train_cmd->add_option("--dataset", train_dataset, "dataset manifest JSON")->required();
    train_cmd->add_option("--epochs", train_epochs, "training epochs");
    train_cmd->add_option("--batch", train_batch, "minibatch size");
    train_cmd->add_option("--lr", train_lr, "learning rate");
    train_cmd->add_option("--stop-loss", train_stop, "stop once epoch loss drops below");
    train_cmd->add_option("--losses", train_losses, "write per-epoch losses to this JSON file");
    add_common(train_cmd);

    // predict-landmarks
    auto* pred_cmd = app.add_subcommand("predict-landmarks", "predict target garment landmarks");
    std::string pred_model_file, pred_model_ann, pred_person_ann;
    pred_cmd->add_option("--predictor", pred_model_file, "predictor model JSON")->required();
    pred_cmd->add_option("--model", pred_model_ann, "model annotation JSON")->required();
    pred_cmd->add_option("--person", pred_person_ann, "person annotation JSON")->required();
    add_common(pred_cmd);

    // compose
    auto* comp_cmd = app.add_subcommand("compose", "compose a warped garment onto a person");
    std::string comp_person, comp_cloth, comp_parsing, comp_mask;
    comp_cmd->add_option("--person", comp_person, "person image PNG")->required();
    comp_cmd->add_option("--cloth", comp_cloth, "warped garment RGBA PNG")->required();
    comp_cmd->add_option("--parsing", comp_parsing, "person parsing label map PNG")->required();
    comp_cmd->add_option("--mask", comp_mask, "external target mask PNG");
    comp_cmd->add_option("--agnostic-labels", opts.agnostic_labels, "label ids removed from person");
    add_common(comp_cmd);

    // metric
    auto* met_cmd = app.add_subcommand("metric", "structural similarity report for two images");
    std::string met_a, met_b;
    met_cmd->add_option("--a", met_a, "first image or directory")->required();
    met_cmd->add_option("--b", met_b, "second image or directory")->required();
    add_common(met_cmd);

    // tryon
    auto* try_cmd = app.add_subcommand("tryon", "full three-stage try-on pipeline");
    vton::PipelineInputs tin;
    try_cmd->add_option("--model-annotation", tin.model_annotation)->required();
    try_cmd->add_option("--person-annotation", tin.person_annotation)->required();
    try_cmd->add_option("--model-image", tin.model_image)->required();
    try_cmd->add_option("--model-parsing", tin.model_parsing)->required();
    try_cmd->add_option("--person-image", tin.person_image, "defaults to the model image");
    try_cmd->add_option("--person-parsing", tin.person_parsing, "defaults to the model parsing");
    try_cmd->add_option("--predictor", tin.predictor_model,
                        "predictor model JSON (omit for identity landmark prediction)");
    try_cmd->add_option("--mask", tin.external_mask, "external target mask PNG");
    try_cmd->add_option("--cloth-labels", opts.cloth_labels, "garment label ids");
    try_cmd->add_option("--agnostic-labels", opts.agnostic_labels, "label ids removed from person");
    add_common(try_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        // Config file fills only the values the user did not pass explicitly.
        if (!config_file.empty()) {
            CommonOpts file_opts = opts;
            apply_config_file(config_file, file_opts);
            if (active->count("--lambda") == 0) opts.lambda = file_opts.lambda;
            if (active->count("--seed") == 0) opts.seed = file_opts.seed;
            if (active->count("--variance") == 0) opts.variance = file_opts.variance;
            if (active->count("--window") == 0) opts.window = file_opts.window;
            if (active->count("--dilate") == 0) opts.dilate = file_opts.dilate;
            if (active->count("--out") == 0) opts.out = file_opts.out;
            if (active->get_option_no_throw("--cloth-labels") == nullptr ||
                active->count("--cloth-labels") == 0)
                opts.cloth_labels = file_opts.cloth_labels;
            if (active->get_option_no_throw("--agnostic-labels") == nullptr ||
                active->count("--agnostic-labels") == 0)
                opts.agnostic_labels = file_opts.agnostic_labels;
        }

        if (active == fit_cmd) {
            const vton::ControlPairs pairs = pairs_from_files(fit_model, fit_person);
            const vton::TpsTransform t = vton::fit_tps(pairs, opts.lambda);
            write_text(resolve_out(opts.out, "fit-tps"), vton::serialize_tps(t));
        } else if (active == warp_cmd) {
            const vton::ControlPairs pairs = pairs_from_files(warp_model, warp_person);
            const vton::LandmarkAnnotation person = vton::load_annotation(warp_person);
            const vton::ImageBuffer src = vton::load_png_rgba(warp_image_path);
            const int w = warp_w > 0 ? warp_w : person.width;
            const int h = warp_h > 0 ? warp_h : person.height;
            const vton::ImageBuffer out = vton::warp_image(src, pairs, opts.lambda, w, h);
            vton::save_png_rgba(out, resolve_out(opts.out, "warp"));
        } else if (active == wp_cmd) {
            const vton::ControlPairs pairs = pairs_from_files(wp_model, wp_person);
            std::ifstream in(wp_points, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open points file: " + wp_points);
            const nlohmann::json pts_json = nlohmann::json::parse(in);
            std::vector<vton::Vec2> pts;
            for (const auto& p : pts_json) pts.push_back({p[0].get<double>(), p[1].get<double>()});
            const std::vector<vton::Vec2> moved = vton::warp_points(pairs, opts.lambda, pts);
            nlohmann::json out = nlohmann::json::array();
            for (const auto& p : moved) out.push_back({p.x, p.y});
            write_text(resolve_out(opts.out, "warp-points"), out.dump() + "\n");
        } else if (active == pert_cmd) {
            vton::LandmarkAnnotation a = vton::load_annotation(pert_annotation);
            if (!a.fashion_landmarks)
                throw std::runtime_error("annotation carries no fashion landmarks");
            const bool was_pixel = a.space == vton::CoordinateSpace::pixel;
            if (was_pixel) a = vton::normalize_landmarks(a);
            vton::PerturbConfig cfg{opts.variance, opts.seed, opts.dilate};
            a.fashion_landmarks = vton::perturb_landmarks(*a.fashion_landmarks, cfg);
            if (was_pixel) a = vton::denormalize_landmarks(a);
            vton::save_annotation(a, resolve_out(opts.out, "perturb"));
        } else if (active == gen_cmd) {
            const vton::ImageBuffer img = vton::load_png_rgba(gen_image);
            const vton::SegMask mask = vton::load_png_mask(gen_mask);
            const vton::LandmarkAnnotation ann = load_normalized(gen_annotation);
            if (!ann.fashion_landmarks)
                throw std::runtime_error("annotation carries no fashion landmarks");
            const vton::SampleMode mode =
                gen_mode == "synth" ? vton::SampleMode::synth : vton::SampleMode::mask_gen;
            const std::string out_dir = resolve_out(opts.out, "gen-samples");

            // Items are independent; per-sample seeds make order irrelevant.
            std::vector<std::future<void>> jobs;
            for (int i = 0; i < gen_count; ++i) {
                jobs.push_back(std::async(std::launch::async, [&, i] {
                    vton::PerturbConfig cfg{opts.variance, vton::mix_seed(opts.seed, i),
                                            opts.dilate};
                    char stem[32];
                    std::snprintf(stem, sizeof(stem), "sample_%04d", i);
                    vton::make_training_sample(img, mask, *ann.fashion_landmarks, cfg, mode,
                                               out_dir, stem);
                }));
                if (jobs.size() >= 4) {
                    for (auto& j : jobs) j.get();
                    jobs.clear();
                }
            }
            for (auto& j : jobs) j.get();
        } else if (active == train_cmd) {
            std::ifstream in(train_dataset, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open dataset manifest: " + train_dataset);
            const nlohmann::json manifest = nlohmann::json::parse(in);
            const fs::path base = fs::path(train_dataset).parent_path();
            std::vector<vton::PosePairSample> dataset;
            for (const auto& pair : manifest.at("pairs")) {
                const vton::LandmarkAnnotation a =
                    load_normalized((base / pair.at("model").get<std::string>()).string());
                const vton::LandmarkAnnotation b =
                    load_normalized((base / pair.at("person").get<std::string>()).string());
                if (!a.fashion_landmarks || !b.fashion_landmarks)
                    throw std::runtime_error("training pair lacks fashion landmarks");
                dataset.push_back({a.human_landmarks, b.human_landmarks, *a.fashion_landmarks,
                                   *b.fashion_landmarks});
            }
            vton::TrainConfig cfg;
            cfg.epochs = train_epochs;
            cfg.batch_size = train_batch;
            cfg.lr = train_lr;
            cfg.seed = opts.seed;
            cfg.stop_loss = train_stop;
            const vton::TrainResult result = vton::train(dataset, cfg);
            vton::save_model(result.model, resolve_out(opts.out, "train-predictor"));
            if (!train_losses.empty()) {
                nlohmann::json jl;
                jl["epoch_losses"] = result.epoch_losses;
                write_text(train_losses, jl.dump() + "\n");
            }
            std::cout << "epochs_run=" << result.epoch_losses.size()
                      << " final_loss=" << (result.epoch_losses.empty()
                                                ? 0.0
                                                : result.epoch_losses.back())
                      << "\n";
        } else if (active == pred_cmd) {
            const vton::PredictorModel net = vton::load_model(pred_model_file);
            const vton::LandmarkAnnotation model = load_normalized(pred_model_ann);
            vton::LandmarkAnnotation person = vton::load_annotation(pred_person_ann);
            const bool was_pixel = person.space == vton::CoordinateSpace::pixel;
            vton::LandmarkAnnotation person_norm =
                was_pixel ? vton::normalize_landmarks(person) : person;
            if (!model.fashion_landmarks)
                throw std::runtime_error("model annotation carries no fashion landmarks");
            person_norm.fashion_landmarks = vton::forward(
                net, model.human_landmarks, person_norm.human_landmarks, *model.fashion_landmarks);
            const vton::LandmarkAnnotation out =
                was_pixel ? vton::denormalize_landmarks(person_norm) : person_norm;
            vton::save_annotation(out, resolve_out(opts.out, "predict-landmarks"));
        } else if (active == comp_cmd) {
            const vton::ImageBuffer person = vton::load_png_rgba(comp_person);
            const vton::ImageBuffer cloth = vton::load_png_rgba(comp_cloth);
            const vton::LabelMap parsing = vton::load_png_labels(comp_parsing);
            const vton::SegMask removed = vton::mask_from_labels(parsing, opts.agnostic_labels);
            const vton::ImageBuffer agnostic = vton::build_person_agnostic(person, removed);
            const vton::ImageBuffer combined = vton::combined_representation(agnostic, cloth);
            const vton::SegMask target =
                comp_mask.empty() ? vton::binarize_alpha(cloth) : vton::load_png_mask(comp_mask);
            const vton::ImageBuffer out = vton::convex_combine(cloth, combined, target);
            vton::save_png_rgba(out, resolve_out(opts.out, "compose"));
        } else if (active == met_cmd) {
            vton::SsimConfig cfg;
            cfg.window = opts.window;
            if (fs::is_directory(met_a) && fs::is_directory(met_b))
                return run_metric_dir(met_a, met_b, cfg, opts.out);
            const vton::ImageBuffer a = vton::load_png_rgba(met_a);
            const vton::ImageBuffer b = vton::load_png_rgba(met_b);
            const std::string report = vton::metric_report_json(a, b, cfg);
            std::cout << report;
            if (!opts.out.empty()) write_text(opts.out, report);
        } else if (active == try_cmd) {
            vton::PipelineConfig cfg;
            cfg.lambda = opts.lambda;
            cfg.ssim_window = opts.window;
            cfg.variance = opts.variance;
            cfg.dilation_radius = opts.dilate;
            cfg.seed = opts.seed;
            cfg.out_dir = resolve_out(opts.out, "tryon");
            cfg.cloth_labels = opts.cloth_labels;
            cfg.agnostic_labels = opts.agnostic_labels;
            const vton::PipelineResult result = vton::run_pipeline(tin, cfg);
            std::cout << "ssim_vs_person=" << result.ssim_vs_person
                      << " uncovered_pixels=" << result.uncovered_pixels << "\n";
        }
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["command"] = active->get_name();
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
