#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "interfere/dataset.hpp"
#include "interfere/geometry.hpp"
#include "interfere/imaging.hpp"
#include "interfere/network.hpp"
#include "interfere/training.hpp"

namespace interfere {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DatasetKind { ThetaL, ThetaC, Image };

struct DatasetChoice {
    DatasetKind kind = DatasetKind::ThetaL;
    std::size_t size = 64;
    std::filesystem::path image;
    ThetaLParams theta_l;
    ThetaCParams theta_c;
};

struct MaskChoice {
    bool from_image = false;
    std::filesystem::path image;
    MaskParams params;
};

/// Checkpoints are either an explicit list or a geometric schedule.
struct CheckpointSpec {
    std::vector<std::uint64_t> explicit_list;
    std::uint64_t first = 100'000;
    std::uint64_t last = 1'000'000;
    std::size_t count = 3;

    std::vector<std::uint64_t> resolve() const;
};

struct ExperimentConfig {
    DatasetChoice dataset;
    MaskChoice mask;
    std::vector<std::size_t> widths{2, 16, 16, 1};
    ActivationSpec activation;
    TrainConfig training;  // sample_seed is replaced per replicate
    CheckpointSpec checkpoints;
    std::size_t replicates = 4;
    std::uint64_t base_seed = 1;
    std::filesystem::path output_dir = "out";
    std::size_t threads = 0;  // 0: one per hardware thread
    DiagramStyle diagram;
    StrongRegionSpec strong_region;

    /// Throws ConfigError on any contract violation. Does not touch the
    /// filesystem.
    void validate() const;

    /// TrainConfig with checkpoints resolved and sample_seed set.
    TrainConfig train_config(std::uint64_t sample_seed) const;
};

/// Sectioned "key = value" text. Relative paths resolve against `base_dir`.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical text for a config; parse_config(format_config(c)) == c.
std::string format_config(const ExperimentConfig& cfg);

}  // namespace interfere
