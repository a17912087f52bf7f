#include "interfere/config.hpp"

#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "interfere/errors.hpp"
#include "interfere/image.hpp"
#include "interfere/keyvalue.hpp"

namespace interfere {

std::vector<std::uint64_t> CheckpointSpec::resolve() const {
    if (!explicit_list.empty()) {
        return explicit_list;
    }
    return geometric_checkpoints(first, last, count);
}

TrainConfig ExperimentConfig::train_config(std::uint64_t sample_seed) const {
    TrainConfig t = training;
    t.checkpoints = checkpoints.resolve();
    t.sample_seed = sample_seed;
    return t;
}

void ExperimentConfig::validate() const {
    try {
        if (dataset.size < 8) {
            throw DomainError("dataset size must be at least 8");
        }
        if (dataset.kind == DatasetKind::Image && dataset.image.empty()) {
            throw DomainError("dataset kind 'image' needs an image path");
        }
        if (mask.from_image && mask.image.empty()) {
            throw DomainError("mask kind 'image' needs an image path");
        }
        if (!mask.from_image && !(mask.params.fraction > 0.0 && mask.params.fraction < 1.0)) {
            throw DomainError("mask fraction must lie in (0, 1)");
        }
        if (widths.size() < 2 || widths.front() != 2 || widths.back() != 1) {
            throw DomainError("network widths must start with 2 inputs and end with 1 output");
        }
        for (std::size_t w : widths) {
            if (w == 0) {
                throw DomainError("network widths must be positive");
            }
        }
        if (!(activation.alpha >= 0.0 && activation.alpha <= 1.0)) {
            throw DomainError("activation alpha must lie in [0, 1]");
        }
        if (replicates < 1) {
            throw DomainError("replicates must be at least 1");
        }
        if (output_dir.empty()) {
            throw DomainError("output_dir must be set");
        }
        train_config(base_seed).validate();
        diagram.validate();
        if (!(strong_region.half_width > 0.0)) {
            throw DomainError("strong region half_width must be positive");
        }
        // Generator parameters are checked by building the images once.
        if (dataset.kind == DatasetKind::ThetaL) {
            (void)generate_theta_l(dataset.size, dataset.theta_l);
        } else if (dataset.kind == DatasetKind::ThetaC) {
            (void)generate_theta_c(dataset.size, dataset.theta_c);
        }
        if (!mask.from_image && dataset.kind != DatasetKind::Image) {
            (void)generate_mask(dataset.size, mask.params);
        }
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("config: {}", e.what()));
    }
}

namespace {

namespace pt = boost::property_tree;

// Section -> permitted keys. Anything else is rejected so typos surface.
const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"dataset",
         {"kind", "size", "image", "foreground", "background", "supersample", "solid_from", "solid_to",
          "solid_width", "dashed_from", "dashed_to", "dashed_width", "dashed_period", "dashed_duty",
          "ring_center", "ring_radius", "ring_thickness"}},
        {"mask", {"kind", "image", "fraction", "seed", "excluded"}},
        {"network", {"widths", "activation", "alpha", "trainable_alpha"}},
        {"training",
         {"learning_rate", "weight_decay", "decay_biases", "sample_order", "total_iterations", "checkpoints",
          "checkpoint_first", "checkpoint_last", "checkpoint_count"}},
        {"experiment", {"replicates", "base_seed", "output_dir", "threads"}},
        {"diagram", {"size", "line_opacity", "background", "dash_period", "supersample"}},
        {"analysis", {"strong_half_width"}},
    };
    return s;
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    const std::string* find(const std::string& section, const std::string& key) const {
        const auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '/'));
        if (!sec) {
            return nullptr;
        }
        const auto it = sec->find(key);
        if (it == sec->not_found()) {
            return nullptr;
        }
        return &it->second.data();
    }

    void real(const std::string& section, const std::string& key, double& out) const {
        if (const auto* v = find(section, key)) {
            out = one(section, key, parse_reals(*v, key));
        }
    }

    void point(const std::string& section, const std::string& key, Point2& out) const {
        if (const auto* v = find(section, key)) {
            const auto r = parse_reals(*v, key);
            if (r.size() != 2) {
                throw ConfigError(fmt::format("config: [{}] {} needs two numbers", section, key));
            }
            out = {r[0], r[1]};
        }
    }

    template <typename Int>
    void integer(const std::string& section, const std::string& key, Int& out) const {
        if (const auto* v = find(section, key)) {
            out = static_cast<Int>(parse_unsigned(*v, key));
        }
    }

    void boolean(const std::string& section, const std::string& key, bool& out) const {
        if (const auto* v = find(section, key)) {
            if (*v == "true") {
                out = true;
            } else if (*v == "false") {
                out = false;
            } else {
                throw ConfigError(fmt::format("config: [{}] {} must be true or false", section, key));
            }
        }
    }

    std::vector<std::uint64_t> integers(const std::string& section, const std::string& key) const {
        std::vector<std::uint64_t> out;
        if (const auto* v = find(section, key)) {
            std::istringstream in(*v);
            std::string tok;
            while (in >> tok) {
                out.push_back(parse_unsigned(tok, key));
            }
        }
        return out;
    }

private:
    static double one(const std::string& section, const std::string& key, const std::vector<double>& v) {
        if (v.size() != 1) {
            throw ConfigError(fmt::format("config: [{}] {} needs one number", section, key));
        }
        return v[0];
    }

    const pt::ptree& tree_;
};

std::filesystem::path resolve_path(const std::string& raw, const std::filesystem::path& base) {
    std::filesystem::path p(raw);
    if (p.is_relative() && !base.empty()) {
        p = base / p;
    }
    return p.lexically_normal();
}

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config: line {}: {}", e.line(), e.message()));
    }

    for (const auto& [section, body] : tree) {
        const auto it = schema().find(section);
        if (it == schema().end() || !body.data().empty()) {
            throw ConfigError(fmt::format("config: unknown section '{}'", section));
        }
        for (const auto& [key, value] : body) {
            if (it->second.count(key) == 0) {
                throw ConfigError(fmt::format("config: unknown key '{}' in [{}]", key, section));
            }
        }
    }

    ExperimentConfig cfg;
    const Reader r(tree);
    try {
        if (const auto* kind = r.find("dataset", "kind")) {
            if (*kind == "theta_l") {
                cfg.dataset.kind = DatasetKind::ThetaL;
            } else if (*kind == "theta_c") {
                cfg.dataset.kind = DatasetKind::ThetaC;
            } else if (*kind == "image") {
                cfg.dataset.kind = DatasetKind::Image;
            } else {
                throw ConfigError(fmt::format("config: unknown dataset kind '{}'", *kind));
            }
        }
        r.integer("dataset", "size", cfg.dataset.size);
        if (const auto* p = r.find("dataset", "image")) {
            cfg.dataset.image = resolve_path(*p, base_dir);
        }
        FeatureParams features;
        r.real("dataset", "foreground", features.foreground);
        r.real("dataset", "background", features.background);
        r.integer("dataset", "supersample", features.supersample);
        cfg.dataset.theta_l.features = features;
        cfg.dataset.theta_c.features = features;

        StripeParams solid = cfg.dataset.theta_l.solid;
        r.point("dataset", "solid_from", solid.from);
        r.point("dataset", "solid_to", solid.to);
        r.real("dataset", "solid_width", solid.width);
        cfg.dataset.theta_l.solid = solid;
        cfg.dataset.theta_c.solid = solid;

        StripeParams& dashed = cfg.dataset.theta_l.dashed;
        r.point("dataset", "dashed_from", dashed.from);
        r.point("dataset", "dashed_to", dashed.to);
        r.real("dataset", "dashed_width", dashed.width);
        r.real("dataset", "dashed_period", dashed.dash_period);
        r.real("dataset", "dashed_duty", dashed.dash_duty);

        RingParams& ring = cfg.dataset.theta_c.ring;
        r.point("dataset", "ring_center", ring.center);
        r.real("dataset", "ring_radius", ring.radius);
        r.real("dataset", "ring_thickness", ring.thickness);

        if (const auto* kind = r.find("mask", "kind")) {
            if (*kind == "generated") {
                cfg.mask.from_image = false;
            } else if (*kind == "image") {
                cfg.mask.from_image = true;
            } else {
                throw ConfigError(fmt::format("config: unknown mask kind '{}'", *kind));
            }
        }
        if (const auto* p = r.find("mask", "image")) {
            cfg.mask.image = resolve_path(*p, base_dir);
        }
        r.real("mask", "fraction", cfg.mask.params.fraction);
        r.integer("mask", "seed", cfg.mask.params.seed);
        if (const auto* v = r.find("mask", "excluded")) {
            const auto e = parse_reals(*v, "excluded");
            if (e.size() != 4) {
                throw ConfigError("config: [mask] excluded needs four numbers: x0 y0 x1 y1");
            }
            cfg.mask.params.excluded = {e[0], e[1], e[2], e[3]};
        }

        if (r.find("network", "widths")) {
            const auto w = r.integers("network", "widths");
            cfg.widths.assign(w.begin(), w.end());
        }
        if (const auto* a = r.find("network", "activation")) {
            cfg.activation.kind = parse_activation_kind(*a);
        }
        r.real("network", "alpha", cfg.activation.alpha);
        r.boolean("network", "trainable_alpha", cfg.activation.trainable);

        r.real("training", "learning_rate", cfg.training.learning_rate);
        r.real("training", "weight_decay", cfg.training.weight_decay);
        r.boolean("training", "decay_biases", cfg.training.decay_biases);
        if (const auto* o = r.find("training", "sample_order")) {
            if (*o == "uniform") {
                cfg.training.order = SampleOrder::Uniform;
            } else if (*o == "epoch_shuffle") {
                cfg.training.order = SampleOrder::EpochShuffle;
            } else {
                throw ConfigError(fmt::format("config: unknown sample_order '{}'", *o));
            }
        }
        r.integer("training", "total_iterations", cfg.training.total_iterations);
        cfg.checkpoints.explicit_list = r.integers("training", "checkpoints");
        r.integer("training", "checkpoint_first", cfg.checkpoints.first);
        r.integer("training", "checkpoint_last", cfg.checkpoints.last);
        r.integer("training", "checkpoint_count", cfg.checkpoints.count);

        r.integer("experiment", "replicates", cfg.replicates);
        r.integer("experiment", "base_seed", cfg.base_seed);
        if (const auto* p = r.find("experiment", "output_dir")) {
            cfg.output_dir = resolve_path(*p, base_dir);
        } else {
            cfg.output_dir = resolve_path(cfg.output_dir.string(), base_dir);
        }
        r.integer("experiment", "threads", cfg.threads);

        r.integer("diagram", "size", cfg.diagram.size);
        r.real("diagram", "line_opacity", cfg.diagram.line_opacity);
        r.real("diagram", "background", cfg.diagram.background_value);
        r.integer("diagram", "dash_period", cfg.diagram.rectangle_dash_period);
        r.integer("diagram", "supersample", cfg.diagram.supersample_factor);

        r.real("analysis", "strong_half_width", cfg.strong_region.half_width);
    } catch (const ParseError& e) {
        throw ConfigError(fmt::format("config: {}", e.what()));
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("config: {}", e.what()));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    const std::string text = read_file(path.string());
    return parse_config(text, path.parent_path());
}

namespace {

std::string real_str(double v) { return fmt::format("{:.17g}", v); }
std::string point_str(Point2 p) { return fmt::format("{:.17g} {:.17g}", p.x, p.y); }

std::string kind_str(DatasetKind k) {
    switch (k) {
        case DatasetKind::ThetaL:
            return "theta_l";
        case DatasetKind::ThetaC:
            return "theta_c";
        case DatasetKind::Image:
            return "image";
    }
    return "theta_l";
}

}  // namespace

std::string format_config(const ExperimentConfig& cfg) {
    std::string out;
    auto line = [&](std::string_view key, const std::string& value) {
        fmt::format_to(std::back_inserter(out), "{} = {}\n", key, value);
    };
    const auto& ds = cfg.dataset;
    const auto& f = ds.theta_l.features;
    out += "[dataset]\n";
    line("kind", kind_str(ds.kind));
    line("size", std::to_string(ds.size));
    if (!ds.image.empty()) {
        line("image", ds.image.generic_string());
    }
    line("foreground", real_str(f.foreground));
    line("background", real_str(f.background));
    line("supersample", std::to_string(f.supersample));
    line("solid_from", point_str(ds.theta_l.solid.from));
    line("solid_to", point_str(ds.theta_l.solid.to));
    line("solid_width", real_str(ds.theta_l.solid.width));
    line("dashed_from", point_str(ds.theta_l.dashed.from));
    line("dashed_to", point_str(ds.theta_l.dashed.to));
    line("dashed_width", real_str(ds.theta_l.dashed.width));
    line("dashed_period", real_str(ds.theta_l.dashed.dash_period));
    line("dashed_duty", real_str(ds.theta_l.dashed.dash_duty));
    line("ring_center", point_str(ds.theta_c.ring.center));
    line("ring_radius", real_str(ds.theta_c.ring.radius));
    line("ring_thickness", real_str(ds.theta_c.ring.thickness));

    out += "\n[mask]\n";
    line("kind", cfg.mask.from_image ? "image" : "generated");
    if (!cfg.mask.image.empty()) {
        line("image", cfg.mask.image.generic_string());
    }
    line("fraction", real_str(cfg.mask.params.fraction));
    line("seed", std::to_string(cfg.mask.params.seed));
    const Rect& e = cfg.mask.params.excluded;
    line("excluded", fmt::format("{:.17g} {:.17g} {:.17g} {:.17g}", e.x0, e.y0, e.x1, e.y1));

    out += "\n[network]\n";
    line("widths", fmt::format("{}", fmt::join(cfg.widths, " ")));
    line("activation", std::string(to_string(cfg.activation.kind)));
    line("alpha", real_str(cfg.activation.alpha));
    line("trainable_alpha", cfg.activation.trainable ? "true" : "false");

    const auto& t = cfg.training;
    out += "\n[training]\n";
    line("learning_rate", real_str(t.learning_rate));
    line("weight_decay", real_str(t.weight_decay));
    line("decay_biases", t.decay_biases ? "true" : "false");
    line("sample_order", t.order == SampleOrder::Uniform ? "uniform" : "epoch_shuffle");
    line("total_iterations", std::to_string(t.total_iterations));
    if (!cfg.checkpoints.explicit_list.empty()) {
        line("checkpoints", fmt::format("{}", fmt::join(cfg.checkpoints.explicit_list, " ")));
    }
    line("checkpoint_first", std::to_string(cfg.checkpoints.first));
    line("checkpoint_last", std::to_string(cfg.checkpoints.last));
    line("checkpoint_count", std::to_string(cfg.checkpoints.count));

    out += "\n[experiment]\n";
    line("replicates", std::to_string(cfg.replicates));
    line("base_seed", std::to_string(cfg.base_seed));
    line("output_dir", cfg.output_dir.generic_string());
    line("threads", std::to_string(cfg.threads));

    out += "\n[diagram]\n";
    line("size", std::to_string(cfg.diagram.size));
    line("line_opacity", real_str(cfg.diagram.line_opacity));
    line("background", real_str(cfg.diagram.background_value));
    line("dash_period", std::to_string(cfg.diagram.rectangle_dash_period));
    line("supersample", std::to_string(cfg.diagram.supersample_factor));

    out += "\n[analysis]\n";
    line("strong_half_width", real_str(cfg.strong_region.half_width));
    return out;
}

}  // namespace interfere
