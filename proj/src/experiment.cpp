#include "interfere/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <iterator>
#include <mutex>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "interfere/errors.hpp"
#include "interfere/geometry.hpp"
#include "interfere/imaging.hpp"
#include "interfere/keyvalue.hpp"
#include "interfere/random.hpp"

namespace interfere {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::string_view kReportHeader = "interfere-randomness-report 1";
constexpr std::string_view kDatasetFile = "dataset.pgm";
constexpr std::string_view kMaskFile = "mask.pgm";

std::string function_image_name(std::size_t r, std::uint64_t it) { return fmt::format("r{}.function.{}.pgm", r, it); }
std::string raw_grid_name(std::size_t r, std::uint64_t it) { return fmt::format("r{}.function.{}.txt", r, it); }
std::string diagram_name(std::size_t r, std::uint64_t it) { return fmt::format("r{}.diagram.{}.pgm", r, it); }
std::string weight_dump_name(std::size_t r, std::uint64_t it) { return fmt::format("r{}.layer1.{}.net", r, it); }
std::string final_network_name(std::size_t r) { return fmt::format("r{}.network.final.net", r); }
std::string report_name(std::uint64_t it) { return fmt::format("report.{}.txt", it); }
std::string variance_image_name(std::uint64_t it) { return fmt::format("variance.{}.pgm", it); }
std::string variance_matrix_name(std::uint64_t it) { return fmt::format("variance.{}.txt", it); }

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// The first layer alone, as a one-layer network, is the checkpoint weight dump.
Network first_layer_only(const Network& net) {
    return Network(net.input_arity(), std::vector<Layer>{net.layer(0)});
}

}  // namespace

ExperimentInputs build_inputs(const ExperimentConfig& cfg) {
    GrayImage image;
    switch (cfg.dataset.kind) {
        case DatasetKind::ThetaL:
            image = generate_theta_l(cfg.dataset.size, cfg.dataset.theta_l);
            break;
        case DatasetKind::ThetaC:
            image = generate_theta_c(cfg.dataset.size, cfg.dataset.theta_c);
            break;
        case DatasetKind::Image:
            image = read_pgm_file(cfg.dataset.image.string());
            break;
    }
    MaskImage mask = cfg.mask.from_image ? MaskImage::from_image(read_pgm_file(cfg.mask.image.string()))
                                         : generate_mask(image.size(), cfg.mask.params);
    if (mask.size() != image.size()) {
        throw ConfigError(fmt::format("config: mask size {} does not match dataset size {}", mask.size(), image.size()));
    }
    return {std::move(image), std::move(mask)};
}

std::vector<fs::path> generate_dataset_files(const ExperimentConfig& cfg) {
    cfg.validate();
    const ExperimentInputs inputs = build_inputs(cfg);
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) {
        throw IoError(cfg.output_dir.string(), "cannot create directory");
    }
    const fs::path image_path = cfg.output_dir / kDatasetFile;
    const fs::path mask_path = cfg.output_dir / kMaskFile;
    write_pgm_file(image_path.string(), inputs.image);
    write_pgm_file(mask_path.string(), inputs.mask.to_image());
    return {image_path, mask_path};
}

// Reports --------------------------------------------------------------------

std::string format_report(const CheckpointReport& report) {
    std::string out{kReportHeader};
    out += '\n';
    auto it = std::back_inserter(out);
    fmt::format_to(it, "checkpoint = {}\nreplicates = {}\n", report.checkpoint, report.replicate_count);
    if (report.sufficient()) {
        fmt::format_to(it, "status = ok\nvariance_mean_training = {:.17g}\nvariance_mean_generalized = {:.17g}\n",
                       *report.variance_training, *report.variance_generalized);
        fmt::format_to(it, "variance_image = {}\nvariance_matrix = {}\n", report.variance_image, report.variance_matrix);
    } else {
        out += "status = insufficient_replicates\n";
    }
    for (const ReplicateSummary& s : report.replicates) {
        const std::size_t r = s.index;
        fmt::format_to(it, "replicate.{}.seed = {}\n", r, s.seed);
        fmt::format_to(it, "replicate.{}.initial_training_error = {:.17g}\n", r, s.initial_training_error);
        fmt::format_to(it, "replicate.{}.training_error = {:.17g}\n", r, s.training_error);
        fmt::format_to(it, "replicate.{}.crossings_training = {}\n", r, s.crossings_training);
        fmt::format_to(it, "replicate.{}.crossings_generalized = {}\n", r, s.crossings_generalized);
        fmt::format_to(it, "replicate.{}.degenerate_neurons = {}\n", r, s.degenerate_neurons);
        fmt::format_to(it, "replicate.{}.generalized_strong_coverage = {:.17g}\n", r, s.generalized_strong_coverage);
    }
    return out;
}

CheckpointReport parse_report(std::string_view text) {
    const KeyValueDoc doc = KeyValueDoc::parse(text, kReportHeader, "report");
    CheckpointReport report;
    report.checkpoint = doc.count("checkpoint");
    report.replicate_count = doc.count("replicates");
    const std::string& status = doc.str("status");
    if (status == "ok") {
        report.variance_training = doc.real("variance_mean_training");
        report.variance_generalized = doc.real("variance_mean_generalized");
        report.variance_image = doc.str("variance_image");
        report.variance_matrix = doc.str("variance_matrix");
    } else if (status != "insufficient_replicates") {
        throw ParseError(fmt::format("report: unknown status '{}'", status));
    }
    for (std::size_t r = 0; r < report.replicate_count; ++r) {
        const std::string p = fmt::format("replicate.{}.", r);
        ReplicateSummary s;
        s.index = r;
        s.seed = doc.count(p + "seed");
        s.initial_training_error = doc.real(p + "initial_training_error");
        s.training_error = doc.real(p + "training_error");
        s.crossings_training = doc.count(p + "crossings_training");
        s.crossings_generalized = doc.count(p + "crossings_generalized");
        s.degenerate_neurons = doc.count(p + "degenerate_neurons");
        s.generalized_strong_coverage = doc.real(p + "generalized_strong_coverage");
        report.replicates.push_back(s);
    }
    return report;
}

// Manifest -------------------------------------------------------------------

std::vector<std::string> RunManifest::all_files() const {
    std::set<std::string> files{std::string(kManifestFile)};
    for (const auto& [category, names] : artifacts) {
        files.insert(names.begin(), names.end());
    }
    return {files.begin(), files.end()};
}

std::string RunManifest::to_json() const {
    json j;
    j["format"] = "interfere-manifest";
    j["format_version"] = 1;
    j["tool_version"] = tool_version;
    j["rng"] = rng;
    j["config"] = config_echo;
    j["checkpoints"] = checkpoints;
    j["replicate_seeds"] = replicate_seeds;
    j["artifacts"] = artifacts;
    j["reports"] = report_files;
    j["wall_clock"] = {{"started_utc", started_utc}, {"finished_utc", finished_utc}, {"elapsed_seconds", elapsed_seconds}};
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(std::string_view text, const fs::path& directory) {
    RunManifest m;
    m.directory = directory;
    try {
        const json j = json::parse(text);
        if (j.at("format") != "interfere-manifest" || j.at("format_version") != 1) {
            throw ParseError("manifest: unsupported format");
        }
        m.tool_version = j.at("tool_version").get<std::string>();
        m.rng = j.at("rng").get<std::string>();
        m.config_echo = j.at("config").get<std::string>();
        m.checkpoints = j.at("checkpoints").get<std::vector<std::uint64_t>>();
        m.replicate_seeds = j.at("replicate_seeds").get<std::vector<std::uint64_t>>();
        m.artifacts = j.at("artifacts").get<std::map<std::string, std::vector<std::string>>>();
        m.report_files = j.at("reports").get<std::vector<std::string>>();
        const json& w = j.at("wall_clock");
        m.started_utc = w.at("started_utc").get<std::string>();
        m.finished_utc = w.at("finished_utc").get<std::string>();
        m.elapsed_seconds = w.at("elapsed_seconds").get<double>();
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("manifest: {}", e.what()));
    }
    if (m.report_files.size() != m.checkpoints.size()) {
        throw ParseError("manifest: report list does not match checkpoints");
    }
    return m;
}

RunManifest load_manifest(const fs::path& path) {
    const std::string text = read_file(path.string());
    try {
        return RunManifest::from_json(text, path.parent_path());
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

// Running --------------------------------------------------------------------

namespace {

void prepare_output_dir(const fs::path& dir, bool overwrite) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError(dir.string(), "cannot create output directory");
    }
    const fs::path manifest = dir / kManifestFile;
    if (overwrite && fs::exists(manifest)) {
        const RunManifest previous = load_manifest(manifest);
        for (const std::string& name : previous.all_files()) {
            fs::remove(dir / name, ec);
            if (ec) {
                throw IoError((dir / name).string(), "cannot remove previous artifact");
            }
        }
    }
    if (!fs::is_empty(dir)) {
        throw IoError(dir.string(), overwrite ? "output directory holds files not produced by a previous run"
                                              : "output directory is not empty (use --overwrite to replace a previous run)");
    }
}

struct ReplicateOutcome {
    std::vector<RealGrid> samples;            // per checkpoint, raw outputs
    std::vector<ReplicateSummary> summaries;  // per checkpoint
};

ReplicateOutcome run_replicate(const ExperimentConfig& cfg, const Dataset& ds, const MaskImage& mask,
                               std::size_t index) {
    const std::uint64_t seed = cfg.base_seed + index;
    const TrainConfig tc = cfg.train_config(seed);
    const fs::path& dir = cfg.output_dir;

    Network net = init_network(cfg.widths, std::span<const ActivationSpec>(&cfg.activation, 1), seed);
    const double initial_error = mean_training_error(net, ds);

    ReplicateOutcome out;
    auto on_checkpoint = [&](std::uint64_t it, const Network& current) {
        RealGrid raw = sample_generalization_raw(current, ds.source_size);
        write_pgm_file((dir / function_image_name(index, it)).string(), clamp_to_image(raw));
        write_file((dir / raw_grid_name(index, it)).string(), format_grid(raw));
        save_network_file((dir / weight_dump_name(index, it)).string(), first_layer_only(current));

        const auto planes = first_layer_hyperplanes(current);
        const auto valid = valid_hyperplanes(planes);
        write_pgm_file((dir / diagram_name(index, it)).string(), render_hyperplane_diagram(valid, cfg.diagram));

        ReplicateSummary s;
        s.index = index;
        s.seed = seed;
        s.initial_training_error = initial_error;
        s.training_error = mean_training_error(current, ds);
        const CrossingCounts crossings = crossings_in_region(valid, mask);
        s.crossings_training = crossings.training;
        s.crossings_generalized = crossings.generalized;
        s.degenerate_neurons = planes.size() - valid.size();
        s.generalized_strong_coverage = generalized_strong_coverage(valid, mask, cfg.strong_region);
        out.summaries.push_back(s);
        out.samples.push_back(std::move(raw));
    };
    net = train(std::move(net), ds, tc, on_checkpoint);
    save_network_file((dir / final_network_name(index)).string(), net);
    return out;
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
    cfg.validate();
    const auto wall_start = std::chrono::steady_clock::now();
    RunManifest manifest;
    manifest.started_utc = utc_now();

    const fs::path& dir = cfg.output_dir;
    const ExperimentInputs inputs = build_inputs(cfg);
    const Dataset ds = build_dataset(inputs.image, inputs.mask);
    prepare_output_dir(dir, options.overwrite);
    write_pgm_file((dir / kDatasetFile).string(), inputs.image);
    write_pgm_file((dir / kMaskFile).string(), inputs.mask.to_image());

    const std::vector<std::uint64_t> checkpoints = cfg.checkpoints.resolve();
    const std::size_t n_rep = cfg.replicates;
    std::vector<ReplicateOutcome> outcomes(n_rep);
    std::vector<std::exception_ptr> errors(n_rep);

    std::size_t n_threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    n_threads = std::min(n_threads, n_rep);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r = next++; r < n_rep; r = next++) {
            try {
                outcomes[r] = run_replicate(cfg, ds, inputs.mask, r);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    auto& art = manifest.artifacts;
    art["inputs"] = {std::string(kDatasetFile), std::string(kMaskFile)};
    for (std::size_t r = 0; r < n_rep; ++r) {
        for (std::uint64_t it : checkpoints) {
            art["function_images"].push_back(function_image_name(r, it));
            art["raw_grids"].push_back(raw_grid_name(r, it));
            art["diagrams"].push_back(diagram_name(r, it));
            art["weight_dumps"].push_back(weight_dump_name(r, it));
        }
        art["final_networks"].push_back(final_network_name(r));
        manifest.replicate_seeds.push_back(cfg.base_seed + r);
    }

    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        const std::uint64_t it = checkpoints[c];
        CheckpointReport report;
        report.checkpoint = it;
        report.replicate_count = n_rep;
        for (std::size_t r = 0; r < n_rep; ++r) {
            report.replicates.push_back(outcomes[r].summaries.at(c));
        }
        if (n_rep >= 2) {
            std::vector<RealGrid> samples;
            for (std::size_t r = 0; r < n_rep; ++r) {
                samples.push_back(outcomes[r].samples.at(c));
            }
            const RandomnessReport rr = generalization_variance(std::span<const RealGrid>(samples), inputs.mask);
            report.variance_training = rr.mean_training;
            report.variance_generalized = rr.mean_generalized;
            report.variance_image = variance_image_name(it);
            report.variance_matrix = variance_matrix_name(it);
            write_pgm_file((dir / report.variance_image).string(), variance_to_image(rr.variance));
            write_file((dir / report.variance_matrix).string(), format_grid(rr.variance));
            art["variance_images"].push_back(report.variance_image);
            art["variance_matrices"].push_back(report.variance_matrix);
        }
        const std::string name = report_name(it);
        write_file((dir / name).string(), format_report(report));
        art["reports"].push_back(name);
        manifest.report_files.push_back(name);
    }

    manifest.directory = dir;
    manifest.tool_version = std::string(kToolVersion);
    manifest.rng = std::string(Rng::kName);
    manifest.config_echo = format_config(cfg);
    manifest.checkpoints = checkpoints;
    manifest.finished_utc = utc_now();
    manifest.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    write_file((dir / kManifestFile).string(), manifest.to_json());
    return manifest;
}

// Comparison -----------------------------------------------------------------

Comparison compare_runs(const RunManifest& a, const RunManifest& b) {
    if (a.checkpoints != b.checkpoints) {
        throw DomainError("compare_runs: checkpoint schedules differ");
    }
    Comparison out;
    for (std::size_t c = 0; c < a.checkpoints.size(); ++c) {
        const CheckpointReport ra = parse_report(read_file((a.directory / a.report_files[c]).string()));
        const CheckpointReport rb = parse_report(read_file((b.directory / b.report_files[c]).string()));
        ComparisonRow row;
        row.checkpoint = a.checkpoints[c];
        row.generalized_a = ra.variance_generalized;
        row.generalized_b = rb.variance_generalized;
        if (row.generalized_a && row.generalized_b && !(*row.generalized_a == 0.0 && *row.generalized_b == 0.0)) {
            row.ratio = *row.generalized_a / *row.generalized_b;
        }
        out.rows.push_back(row);
    }
    return out;
}

std::string format_comparison(const Comparison& c) {
    auto num = [](const std::optional<double>& v) {
        return v ? fmt::format("{:.17g}", *v) : std::string("undefined");
    };
    std::string out = "interfere-comparison 1\n";
    for (const ComparisonRow& row : c.rows) {
        fmt::format_to(std::back_inserter(out),
                       "checkpoint.{0}.generalized_variance_a = {1}\n"
                       "checkpoint.{0}.generalized_variance_b = {2}\n"
                       "checkpoint.{0}.ratio = {3}\n",
                       row.checkpoint, num(row.generalized_a), num(row.generalized_b), num(row.ratio));
    }
    return out;
}

}  // namespace interfere
