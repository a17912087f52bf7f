#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "interfere/config.hpp"
#include "interfere/dataset.hpp"

namespace interfere {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::string_view kManifestFile = "manifest.json";

/// Image and mask described by a config, before the pixel split.
struct ExperimentInputs {
    GrayImage image;
    MaskImage mask;
};

ExperimentInputs build_inputs(const ExperimentConfig& cfg);

/// Writes dataset.pgm and mask.pgm into the output directory; returns their
/// paths.
std::vector<std::filesystem::path> generate_dataset_files(const ExperimentConfig& cfg);

struct ReplicateSummary {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    double initial_training_error = 0.0;
    double training_error = 0.0;
    std::size_t crossings_training = 0;
    std::size_t crossings_generalized = 0;
    std::size_t degenerate_neurons = 0;
    double generalized_strong_coverage = 0.0;
};

/// One randomness report per checkpoint. `variance_*` are absent when fewer
/// than two replicates ran.
struct CheckpointReport {
    std::uint64_t checkpoint = 0;
    std::size_t replicate_count = 0;
    std::optional<double> variance_training;
    std::optional<double> variance_generalized;
    std::string variance_image;
    std::string variance_matrix;
    std::vector<ReplicateSummary> replicates;

    bool sufficient() const { return variance_generalized.has_value(); }
};

std::string format_report(const CheckpointReport& report);
CheckpointReport parse_report(std::string_view text);

/// Reproducibility record written last into the output directory. File names
/// are relative to `directory`.
struct RunManifest {
    std::filesystem::path directory;
    std::string tool_version;
    std::string rng;
    std::string config_echo;
    std::vector<std::uint64_t> checkpoints;
    std::vector<std::uint64_t> replicate_seeds;
    /// Category -> files. Categories: inputs, function_images, raw_grids,
    /// diagrams, weight_dumps, final_networks, reports, variance_images,
    /// variance_matrices.
    std::map<std::string, std::vector<std::string>> artifacts;
    /// Index-aligned with `checkpoints`.
    std::vector<std::string> report_files;
    std::string started_utc;
    std::string finished_utc;
    double elapsed_seconds = 0.0;

    /// Every listed file plus the manifest itself, sorted.
    std::vector<std::string> all_files() const;

    std::string to_json() const;
    static RunManifest from_json(std::string_view text, const std::filesystem::path& directory);
};

RunManifest load_manifest(const std::filesystem::path& path);

struct RunOptions {
    /// Permit reuse of an output directory holding a previous run: the files
    /// its manifest lists are removed first. Other files still block the run.
    bool overwrite = false;
};

/// Builds the dataset, trains every replicate, writes per-checkpoint images,
/// weight dumps, diagrams and randomness reports, and finally the manifest.
RunManifest run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

struct ComparisonRow {
    std::uint64_t checkpoint = 0;
    std::optional<double> generalized_a;
    std::optional<double> generalized_b;
    /// a / b; absent when undefined (0 / 0 or a missing variance).
    std::optional<double> ratio;
};

struct Comparison {
    std::vector<ComparisonRow> rows;
};

Comparison compare_runs(const RunManifest& a, const RunManifest& b);
std::string format_comparison(const Comparison& c);

}  // namespace interfere
