// Command-line front end: run, compare, render-weights, gen-dataset.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "interfere/config.hpp"
#include "interfere/errors.hpp"
#include "interfere/experiment.hpp"
#include "interfere/geometry.hpp"
#include "interfere/image.hpp"
#include "interfere/imaging.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kIoError = 2, kNumericError = 3 };

}  // namespace

int main(int argc, char** argv) {
    using namespace interfere;
    namespace fs = std::filesystem;

    CLI::App app{"Train small tanh networks on image-defined 2-D sets and measure how randomly they generalize."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    std::string config_path;
    std::string output_override;
    bool overwrite = false;
    auto* run = app.add_subcommand("run", "Run the replicate experiment described by a config file");
    run->add_option("config", config_path, "Experiment config")->required();
    run->add_option("--output-dir", output_override, "Override [experiment] output_dir");
    run->add_flag("--overwrite", overwrite, "Replace the artifacts of a previous run in the output directory");

    std::string manifest_a;
    std::string manifest_b;
    std::string compare_out;
    auto* compare = app.add_subcommand("compare", "Compare generalized-region variance of two runs");
    compare->add_option("manifest_a", manifest_a, "Manifest of the first run")->required();
    compare->add_option("manifest_b", manifest_b, "Manifest of the second run")->required();
    compare->add_option("-o,--output", compare_out, "Also write the comparison to this file");

    std::string dump_path;
    std::string image_path;
    std::string style_config;
    auto* render = app.add_subcommand("render-weights", "Re-render a zero-line diagram from a weight dump");
    render->add_option("weight_dump", dump_path, "Network or first-layer dump")->required();
    render->add_option("out_image", image_path, "Output image")->required();
    render->add_option("--config", style_config, "Take the [diagram] style from this config");

    std::string gen_config;
    std::string gen_output;
    auto* gen = app.add_subcommand("gen-dataset", "Write the dataset and mask images without training");
    gen->add_option("config", gen_config, "Experiment config")->required();
    gen->add_option("--output-dir", gen_output, "Override [experiment] output_dir");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ExperimentConfig cfg = load_config(config_path);
            if (!output_override.empty()) {
                cfg.output_dir = output_override;
            }
            const RunManifest m = run_experiment(cfg, RunOptions{overwrite});
            std::cout << fmt::format("wrote {} files to {} in {:.1f} s\n", m.all_files().size(),
                                     cfg.output_dir.string(), m.elapsed_seconds);
        } else if (*compare) {
            const RunManifest a = load_manifest(manifest_a);
            const RunManifest b = load_manifest(manifest_b);
            const std::string text = format_comparison(compare_runs(a, b));
            std::cout << text;
            if (!compare_out.empty()) {
                write_file(compare_out, text);
            }
        } else if (*render) {
            DiagramStyle style;
            if (!style_config.empty()) {
                style = load_config(style_config).diagram;
            }
            const Network net = load_network_file(dump_path);
            const auto planes = valid_hyperplanes(first_layer_hyperplanes(net));
            write_pgm_file(image_path, render_hyperplane_diagram(planes, style));
        } else if (*gen) {
            ExperimentConfig cfg = load_config(gen_config);
            if (!gen_output.empty()) {
                cfg.output_dir = gen_output;
            }
            for (const fs::path& p : generate_dataset_files(cfg)) {
                std::cout << p.string() << '\n';
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const ParseError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumericError;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    }
    return kOk;
}
