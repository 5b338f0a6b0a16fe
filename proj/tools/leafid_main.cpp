#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "leafid/color.hpp"
#include "leafid/errors.hpp"
#include "leafid/io.hpp"
#include "leafid/pipeline.hpp"
#include "leafid/vein.hpp"

namespace fs = std::filesystem;
using namespace leafid;

namespace {

struct CommonArgs {
    ExtractionOptions opts;
    int jobs = 0;
    bool no_cache = false;
    std::string cache_dir;
    std::string foreground = "auto";
    int vein_threshold = -1;
};

void add_extraction_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--foreground", args.foreground, "Leaf side of the Otsu split")
        ->check(CLI::IsMember({"auto", "dark", "light"}));
    cmd->add_flag("--no-pft-mask",
                  [&args](std::int64_t) { args.opts.pft.mask_background = false; },
                  "Run the polar Fourier transform on the unmasked grayscale image");
    cmd->add_flag("--color-full-image",
                  [&args](std::int64_t) { args.opts.color_mask = false; },
                  "Compute color moments over the whole raster, not just the leaf");
    cmd->add_option("--glcm-levels", args.opts.glcm_levels, "Gray levels for the GLCM")
        ->check(CLI::Range(2, 256));
    cmd->add_option("--glcm-distance", args.opts.glcm_distance, "GLCM pixel distance")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--idm-standard",
                  [&args](std::int64_t) { args.opts.haralick.standard_idm = true; },
                  "Use the unsquared homogeneity numerator");
    cmd->add_flag("--correlation-standard",
                  [&args](std::int64_t) { args.opts.haralick.standard_correlation = true; },
                  "Use the standard correlation form");
    cmd->add_flag("--vein-dark",
                  [&args](std::int64_t) { args.opts.vein.dark_veins = true; },
                  "Extract dark veins (black top-hat)");
    cmd->add_option("--vein-threshold", args.vein_threshold,
                    "Fixed top-hat threshold instead of per-radius Otsu")
        ->check(CLI::Range(0, 255));
    cmd->add_option("--jobs", args.jobs, "Worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--no-cache", args.no_cache, "Disable the on-disk feature cache");
    cmd->add_option("--cache-dir", args.cache_dir,
                    "Feature cache directory (default: LEAFID_CACHE_DIR or the dataset root)");
}

ExtractionOptions finalize_opts(CommonArgs& args) {
    if (args.foreground == "dark")
        args.opts.foreground = ForegroundPolicy::Dark;
    else if (args.foreground == "light")
        args.opts.foreground = ForegroundPolicy::Light;
    else
        args.opts.foreground = ForegroundPolicy::Auto;
    args.opts.vein.fixed_threshold = args.vein_threshold;
    return args.opts;
}

std::unique_ptr<FeatureCache> open_cache(const CommonArgs& args, const std::string& data_root) {
    if (args.no_cache) return nullptr;
    std::string dir = args.cache_dir;
    if (dir.empty())
        if (const char* env = std::getenv("LEAFID_CACHE_DIR")) dir = env;
    if (dir.empty()) dir = data_root;
    auto cache = std::make_unique<FeatureCache>((fs::path(dir) / "leafid_features.csv").string());
    cache->load();
    return cache;
}

// --data accepts either a class-per-directory root or a manifest CSV
// (path,label,split) for datasets whose labels are not directory names.
DatasetManifest load_dataset(const std::string& data) {
    if (fs::is_directory(data)) return scan_dataset(data);
    return load_manifest_csv(data);
}

std::string dataset_root(const std::string& data) {
    if (fs::is_directory(data)) return data;
    const fs::path parent = fs::path(data).parent_path();
    return parent.empty() ? std::string(".") : parent.string();
}

std::vector<FeatureConfig> parse_config_list(const std::string& text) {
    if (text == "table2") return FeatureConfig::table2();
    std::vector<FeatureConfig> configs;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) configs.push_back(FeatureConfig::parse(item));
    if (configs.empty()) throw InvalidArgument("no configs in: " + text);
    return configs;
}

void print_failures(const std::vector<ExtractionFailure>& failures) {
    for (const auto& f : failures)
        std::cerr << "warning: skipped " << f.path << " (" << f.error << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"leafid - leaf image identification toolkit"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string data_dir, image_path, out_path, model_path;
    std::string config_name = "best-flavia";
    std::string configs_text = "table2";
    int train_n = 40, test_n = 10, repeats = 5;
    std::uint64_t seed = 1;
    double sigma = 0.05;
    std::vector<double> sigmas;
    std::vector<int> sizes;

    std::string tophat_prefix;
    auto* segment = app.add_subcommand("segment", "Segment a leaf and write the mask PNG");
    segment->add_option("--image", image_path, "Input image")->required()
        ->check(CLI::ExistingFile);
    segment->add_option("--out", out_path, "Output mask PNG")->required();
    segment->add_option("--tophat", tophat_prefix,
                        "Also write the vein top-hat rasters as <prefix>_r{1..4}.png");
    add_extraction_flags(segment, common);

    auto* extract = app.add_subcommand("extract", "Extract feature vectors to CSV");
    extract->add_option("--data", data_dir, "Dataset root (directory per class) or manifest CSV")
        ->required()->check(CLI::ExistingPath);
    extract->add_option("--config", config_name, "Feature configuration");
    extract->add_option("--out", out_path, "Output CSV")->required();
    add_extraction_flags(extract, common);

    auto* train_cmd = app.add_subcommand("train", "Train a PNN and save the model JSON");
    train_cmd->add_option("--data", data_dir)->required()->check(CLI::ExistingPath);
    train_cmd->add_option("--config", config_name, "Feature configuration");
    train_cmd->add_option("--train", train_n, "Training images per class")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--test", test_n, "Held-out images per class")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--sigma", sigma, "PNN smoothing factor")->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", seed, "Split seed");
    train_cmd->add_option("--out", out_path, "Output model JSON")->required();
    add_extraction_flags(train_cmd, common);

    auto* classify_cmd = app.add_subcommand("classify", "Classify one leaf image");
    classify_cmd->add_option("--model", model_path, "Model JSON")->required()
        ->check(CLI::ExistingFile);
    classify_cmd->add_option("--image", image_path, "Input image")->required()
        ->check(CLI::ExistingFile);
    add_extraction_flags(classify_cmd, common);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Train/test protocol, report CSV");
    evaluate_cmd->add_option("--data", data_dir)->required()->check(CLI::ExistingPath);
    evaluate_cmd->add_option("--config", config_name, "Feature configuration");
    evaluate_cmd->add_option("--train", train_n)->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--test", test_n)->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--sigma", sigma)->check(CLI::PositiveNumber);
    evaluate_cmd->add_option("--seed", seed);
    evaluate_cmd->add_option("--out", out_path, "Report CSV")->required();
    add_extraction_flags(evaluate_cmd, common);

    auto* ablation = app.add_subcommand("ablation", "Evaluate a list of feature configs");
    ablation->add_option("--data", data_dir)->required()->check(CLI::ExistingPath);
    ablation->add_option("--configs", configs_text,
                         "Comma-separated configs or the preset 'table2'");
    ablation->add_option("--train", train_n)->check(CLI::PositiveNumber);
    ablation->add_option("--test", test_n)->check(CLI::PositiveNumber);
    ablation->add_option("--sigma", sigma)->check(CLI::PositiveNumber);
    ablation->add_option("--seed", seed);
    ablation->add_option("--out", out_path, "Ablation CSV")->required();
    add_extraction_flags(ablation, common);

    auto* sweep = app.add_subcommand("sigma-sweep", "Accuracy as a function of sigma");
    sweep->add_option("--data", data_dir)->required()->check(CLI::ExistingPath);
    sweep->add_option("--config", config_name, "Feature configuration");
    sweep->add_option("--sigmas", sigmas, "Sigma values")->delimiter(',');
    sweep->add_option("--train", train_n)->check(CLI::PositiveNumber);
    sweep->add_option("--test", test_n)->check(CLI::PositiveNumber);
    sweep->add_option("--seed", seed);
    sweep->add_option("--out", out_path, "Curve CSV")->required();
    add_extraction_flags(sweep, common);

    auto* curve = app.add_subcommand("learning-curve", "Accuracy as a function of train size");
    curve->add_option("--data", data_dir)->required()->check(CLI::ExistingPath);
    curve->add_option("--config", config_name, "Feature configuration");
    curve->add_option("--sizes", sizes, "Training sizes per class")->delimiter(',')->required();
    curve->add_option("--test", test_n)->check(CLI::PositiveNumber);
    curve->add_option("--repeats", repeats)->check(CLI::PositiveNumber);
    curve->add_option("--sigma", sigma)->check(CLI::PositiveNumber);
    curve->add_option("--seed", seed);
    curve->add_option("--out", out_path, "Curve CSV")->required();
    add_extraction_flags(curve, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const ExtractionOptions opts = finalize_opts(common);

        if (segment->parsed()) {
            const LoadedImage img = load_leaf_image(image_path);
            const LeafMask mask = segment_leaf(img.gray, opts.foreground);
            write_mask_png(mask, out_path);
            std::cout << "mask written: " << out_path << " (" << mask.count()
                      << " leaf pixels)\n";
            if (!tophat_prefix.empty()) {
                GrayImage work = img.gray;
                if (opts.vein.dark_veins)
                    for (int y = 0; y < work.height(); ++y)
                        for (int x = 0; x < work.width(); ++x)
                            work.at(x, y) = static_cast<std::uint8_t>(255 - work.at(x, y));
                for (int radius = 1; radius <= 4; ++radius) {
                    const GrayImage opened = gray_opening(work, radius);
                    GrayImage tophat(work.width(), work.height(), 0);
                    for (int y = 0; y < work.height(); ++y)
                        for (int x = 0; x < work.width(); ++x)
                            if (mask.at(x, y))
                                tophat.at(x, y) = static_cast<std::uint8_t>(
                                    std::max(work.at(x, y) - opened.at(x, y), 0));
                    const std::string path =
                        tophat_prefix + "_r" + std::to_string(radius) + ".png";
                    write_gray_png(tophat, path);
                    std::cout << "top-hat written: " << path << "\n";
                }
            }
        } else if (extract->parsed()) {
            const FeatureConfig config = FeatureConfig::parse(config_name);
            const DatasetManifest manifest = load_dataset(data_dir);
            auto cache = open_cache(common, dataset_root(data_dir));
            const ExtractedGroups extracted =
                extract_groups(manifest, config, opts, common.jobs, cache.get());
            if (cache) cache->save();
            print_failures(extracted.failures);

            std::ofstream out(out_path);
            if (!out) throw IoError("cannot open for writing: " + out_path);
            out << "path,label,values\n";
            std::size_t written = 0;
            for (std::size_t i = 0; i < extracted.manifest.entries.size(); ++i) {
                if (!extracted.groups[i]) continue;
                const auto& e = extracted.manifest.entries[i];
                out << e.path << ',' << e.label;
                for (double v : assemble_features(*extracted.groups[i], config)) {
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%.17g", v);
                    out << ',' << buf;
                }
                out << '\n';
                ++written;
            }
            std::cout << "features written: " << out_path << " (" << written << " rows, config "
                      << config.name() << ")\n";
        } else if (train_cmd->parsed()) {
            const FeatureConfig config = FeatureConfig::parse(config_name);
            const DatasetManifest manifest = load_dataset(data_dir);
            auto cache = open_cache(common, dataset_root(data_dir));
            const Protocol protocol{train_n, test_n, seed, sigma, common.jobs};
            const ProtocolRun run = run_protocol(manifest, config, protocol, opts, cache.get());
            if (cache) cache->save();
            print_failures(run.report.failures);
            save_model(run.model, out_path);
            std::cout << "model written: " << out_path << " (" << run.model.classes.size()
                      << " classes, sigma " << sigma << ")\n";
            std::cout << "held-out accuracy: " << run.report.accuracy << " (" << run.report.n_correct
                      << "/" << run.report.n_test << ")\n";
        } else if (classify_cmd->parsed()) {
            const PnnModel model = load_model(model_path);
            const FeatureConfig config = FeatureConfig::parse(model.feature_config);
            const LeafFeatureGroups groups = extract_feature_groups(image_path, opts, config);
            const Classification result = classify(model, assemble_features(groups, config));
            std::cout << "prediction: " << result.label << '\n';
            std::vector<std::size_t> order(model.classes.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return result.posterior[a] > result.posterior[b];
            });
            const std::size_t top = std::min<std::size_t>(5, order.size());
            for (std::size_t k = 0; k < top; ++k) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.4f", result.posterior[order[k]]);
                std::cout << "  " << model.classes[order[k]] << "  " << buf << '\n';
            }
        } else if (evaluate_cmd->parsed()) {
            const FeatureConfig config = FeatureConfig::parse(config_name);
            const DatasetManifest manifest = load_dataset(data_dir);
            auto cache = open_cache(common, dataset_root(data_dir));
            const Protocol protocol{train_n, test_n, seed, sigma, common.jobs};
            const ProtocolRun run = run_protocol(manifest, config, protocol, opts, cache.get());
            if (cache) cache->save();
            print_failures(run.report.failures);
            write_report_csv(run.report, out_path);
            std::cout << "config " << config.name() << ": accuracy " << run.report.accuracy
                      << " (" << run.report.n_correct << "/" << run.report.n_test << ")\n";
            std::cout << "report written: " << out_path << '\n';
        } else if (ablation->parsed()) {
            const std::vector<FeatureConfig> configs = parse_config_list(configs_text);
            const DatasetManifest manifest = load_dataset(data_dir);
            auto cache = open_cache(common, dataset_root(data_dir));
            const Protocol protocol{train_n, test_n, seed, sigma, common.jobs};
            const auto reports = ablation_grid(manifest, configs, protocol, opts, cache.get());
            if (cache) cache->save();
            if (!reports.empty()) print_failures(reports.front().failures);
            write_ablation_csv(reports, out_path);
            for (const auto& r : reports)
                std::cout << r.config_name << ": " << r.accuracy << '\n';
            std::cout << "ablation written: " << out_path << '\n';
        } else if (sweep->parsed()) {
            if (sigmas.empty())
                sigmas = {0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
            const FeatureConfig config = FeatureConfig::parse(config_name);
            const DatasetManifest manifest = load_dataset(data_dir);
            auto cache = open_cache(common, dataset_root(data_dir));
            const Protocol protocol{train_n, test_n, seed, sigma, common.jobs};
            const auto points = sigma_sweep(manifest, config, sigmas, protocol, opts, cache.get());
            if (cache) cache->save();
            write_sweep_csv(points, out_path);
            for (const auto& p : points)
                std::cout << "sigma " << p.sigma << ": " << p.accuracy << '\n';
            std::cout << "curve written: " << out_path << '\n';
        } else if (curve->parsed()) {
            const FeatureConfig config = FeatureConfig::parse(config_name);
            const DatasetManifest manifest = load_dataset(data_dir);
            auto cache = open_cache(common, dataset_root(data_dir));
            const auto points = learning_curve(manifest, config, sizes, test_n, repeats, seed,
                                               sigma, opts, common.jobs, cache.get());
            if (cache) cache->save();
            write_learning_csv(points, out_path);
            for (const auto& p : points)
                std::cout << "train " << p.train_size << ": " << p.mean_accuracy << '\n';
            std::cout << "curve written: " << out_path << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
