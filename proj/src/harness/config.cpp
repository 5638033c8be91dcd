#include "sociocast/harness/config.hpp"

#include "sociocast/core/io.hpp"
#include "sociocast/errors.hpp"

#include <toml.hpp>

#include <cstdio>
#include <set>

namespace sociocast::harness {

namespace {

ArimaOrder order_from(const toml::array& arr, std::string_view where) {
    if (arr.size() != 3) {
        throw ConfigError(std::string(where) + ": ARIMA order must be [p, d, q]");
    }
    std::size_t v[3];
    for (std::size_t i = 0; i < 3; ++i) {
        const auto x = arr[i].value<std::int64_t>();
        if (!x || *x < 0) {
            throw ConfigError(std::string(where) + ": ARIMA order entries must be nonnegative integers");
        }
        v[i] = static_cast<std::size_t>(*x);
    }
    return {v[0], v[1], v[2]};
}

std::string required(const toml::table& t, std::string_view key, std::string_view where) {
    const auto v = t[key].value<std::string>();
    if (!v) {
        throw ConfigError(std::string(where) + ": missing string '" + std::string(key) + "'");
    }
    return *v;
}

TimeRange date_range(const toml::table& split, std::string_view key) {
    const auto* arr = split[key].as_array();
    if (arr == nullptr || arr->size() != 2) {
        throw ConfigError("split." + std::string(key) + " must be [first_day, last_day]");
    }
    const auto first = (*arr)[0].value<std::string>();
    const auto last = (*arr)[1].value<std::string>();
    if (!first || !last) {
        throw ConfigError("split." + std::string(key) + " must hold YYYY-MM-DD strings");
    }
    return {parse_date(*first), parse_date(*last) + kSecondsPerDay};
}

ModelSpec parse_model(const toml::table& t, std::size_t index) {
    const std::string where = "models[" + std::to_string(index) + "]";
    ModelSpec m;
    m.name = required(t, "name", where);
    const std::string kind = t["kind"].value_or(m.name);
    if (kind == "shifted") {
        m.kind = ModelKind::shifted;
    } else if (kind == "arima") {
        m.kind = ModelKind::arima;
        if (const auto* order = t["order"].as_array()) {
            m.order = order_from(*order, where);
        }
        if (const auto grid_name = t["grid"].value<std::string>()) {
            if (*grid_name != "default") {
                throw ConfigError(where + ": grid must be \"default\" or a list of [p, d, q]");
            }
            m.grid = default_arima_grid();
        } else if (const auto* grid = t["grid"].as_array()) {
            for (const auto& entry : *grid) {
                const auto* arr = entry.as_array();
                if (arr == nullptr) {
                    throw ConfigError(where + ": grid entries must be [p, d, q]");
                }
                m.grid.push_back(order_from(*arr, where));
            }
        }
        if (!m.order && m.grid.empty()) {
            m.grid = default_arima_grid();
        }
        if (m.order && !m.grid.empty()) {
            throw ConfigError(where + ": give either order or grid, not both");
        }
    } else if (kind == "hawkes") {
        m.kind = ModelKind::hawkes;
        m.n_sims = static_cast<std::size_t>(t["n_sims"].value_or<std::int64_t>(100));
        m.tol = t["tol"].value_or(1e-6);
        m.max_iter = static_cast<std::size_t>(t["max_iter"].value_or<std::int64_t>(500));
    } else if (kind == "ensemble") {
        m.kind = ModelKind::ensemble;
        if (const auto* comps = t["components"].as_array()) {
            for (const auto& c : *comps) {
                const auto s = c.value<std::string>();
                if (!s) {
                    throw ConfigError(where + ": components must be model names");
                }
                m.components.push_back(*s);
            }
        }
        if (const auto* w = t["weights"].as_array()) {
            for (const auto& x : *w) {
                const auto v = x.value<double>();
                if (!v) {
                    throw ConfigError(where + ": weights must be numbers");
                }
                m.weights.push_back(*v);
            }
        }
    } else {
        throw ConfigError(where + ": unknown model kind '" + kind + "'");
    }
    return m;
}

} // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::shifted:
        return "shifted";
    case ModelKind::arima:
        return "arima";
    case ModelKind::hawkes:
        return "hawkes";
    case ModelKind::ensemble:
        return "ensemble";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (datasets.empty()) {
        throw ConfigError("config needs at least one dataset");
    }
    if (models.size() < 2) {
        throw ConfigError("config needs at least two models to compare");
    }
    if (bin_width <= 0 || kSecondsPerDay % bin_width != 0) {
        throw ConfigError("bin width must divide a day");
    }
    for (const TimeRange& r : {split.train(), split.validation(), split.test()}) {
        if (r.start % bin_width != 0 || r.end % bin_width != 0) {
            throw ConfigError("split periods must align to the bin width");
        }
    }
    const auto test_bins = static_cast<std::size_t>(split.test().length() / bin_width);
    if (protocol == Protocol::short_term && (short_block == 0 || test_bins % short_block != 0)) {
        throw ConfigError("test period must be a whole number of short-term blocks");
    }
    if (metrics.empty()) {
        throw ConfigError("at least one metric must be selected");
    }
    std::set<std::string> names;
    for (const auto& m : models) {
        if (m.name.empty() || m.name.find_first_of("/\\,\"") != std::string::npos) {
            throw ConfigError("model names must be non-empty without '/', '\\\\', ',' or quotes");
        }
        if (!names.insert(m.name).second) {
            throw ConfigError("duplicate model name '" + m.name + "'");
        }
        if (m.kind == ModelKind::hawkes && (m.n_sims == 0 || !(m.tol > 0.0) || m.max_iter == 0)) {
            throw ConfigError("model '" + m.name + "': n_sims, tol and max_iter must be positive");
        }
        if (m.kind == ModelKind::ensemble) {
            if (m.components.empty()) {
                throw ConfigError("ensemble '" + m.name + "' needs components");
            }
            for (const auto& c : m.components) {
                const ModelSpec* dep = find_model(c);
                if (dep == nullptr || dep->kind == ModelKind::ensemble || names.count(c) == 0) {
                    throw ConfigError("ensemble '" + m.name + "' component '" + c +
                                      "' must be a non-ensemble model declared before it");
                }
            }
            if (!m.weights.empty() && m.weights.size() != m.components.size()) {
                throw ConfigError("ensemble '" + m.name + "' needs one weight per component");
            }
        }
    }
    if (heatmap && (find_model(heatmap->base) == nullptr || find_model(heatmap->challenger) == nullptr)) {
        throw ConfigError("heatmap models must be configured models");
    }
}

const ModelSpec* ExperimentConfig::find_model(std::string_view name) const {
    for (const auto& m : models) {
        if (m.name == name) {
            return &m;
        }
    }
    return nullptr;
}

ExperimentConfig parse_config(std::string_view toml_text, const std::filesystem::path& base_dir) {
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        throw ConfigError(std::string("invalid TOML: ") + std::string(e.description()));
    }
    ExperimentConfig cfg;
    cfg.source_hash = fnv1a_hex(toml_text);
    try {
        cfg.seed = static_cast<std::uint64_t>(root["seed"].value_or<std::int64_t>(0));
        cfg.output_dir = root["output_dir"].value_or<std::string>("out");
        cfg.protocol = parse_protocol(root["protocol"].value_or<std::string>("long"));
        cfg.bin_width = root["bin_width_hours"].value_or<std::int64_t>(1) * kSecondsPerHour;
        cfg.short_block = static_cast<std::size_t>(root["short_block"].value_or<std::int64_t>(24));
        cfg.strict = root["strict"].value_or(false);
        cfg.workers = static_cast<std::size_t>(root["workers"].value_or<std::int64_t>(0));
        if (const auto* metrics = root["metrics"].as_array()) {
            cfg.metrics.clear();
            for (const auto& m : *metrics) {
                cfg.metrics.push_back(parse_metric(m.value_or<std::string>("")));
            }
        }

        const auto* split = root["split"].as_table();
        if (split == nullptr) {
            throw ConfigError("missing [split] table");
        }
        if (const auto start = (*split)["start"].value<std::string>()) {
            cfg.split = SplitSpec::standard(parse_date(*start));
        } else {
            cfg.split = SplitSpec(date_range(*split, "train"), date_range(*split, "validation"),
                                  date_range(*split, "test"));
        }

        const auto* datasets = root["datasets"].as_array();
        if (datasets == nullptr) {
            throw ConfigError("missing [[datasets]]");
        }
        for (std::size_t i = 0; i < datasets->size(); ++i) {
            const auto* t = (*datasets)[i].as_table();
            const std::string where = "datasets[" + std::to_string(i) + "]";
            if (t == nullptr) {
                throw ConfigError(where + " must be a table");
            }
            DatasetSpec d;
            d.domain = required(*t, "domain", where);
            d.platform = parse_platform(required(*t, "platform", where));
            d.path = required(*t, "path", where);
            if (d.path.is_relative() && !base_dir.empty()) {
                d.path = base_dir / d.path;
            }
            if (const auto* topics = (*t)["topics"].as_array()) {
                for (const auto& x : *topics) {
                    d.topics.push_back(x.value_or<std::string>(""));
                }
            }
            cfg.datasets.push_back(std::move(d));
        }

        const auto* models = root["models"].as_array();
        if (models == nullptr) {
            throw ConfigError("missing [[models]]");
        }
        for (std::size_t i = 0; i < models->size(); ++i) {
            const auto* t = (*models)[i].as_table();
            if (t == nullptr) {
                throw ConfigError("models entries must be tables");
            }
            cfg.models.push_back(parse_model(*t, i));
        }

        if (const auto* hm = root["heatmap"].as_table()) {
            cfg.heatmap = HeatmapSpec{required(*hm, "base", "heatmap"), required(*hm, "challenger", "heatmap")};
        } else if (cfg.find_model("arima") != nullptr && cfg.find_model("shifted") != nullptr) {
            cfg.heatmap = HeatmapSpec{"arima", "shifted"};
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text, path.parent_path());
}

ReplayConfig load_replay_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    toml::table root;
    try {
        root = toml::parse(text);
    } catch (const toml::parse_error& e) {
        throw ConfigError(std::string("invalid TOML: ") + std::string(e.description()));
    }
    ReplayConfig cfg;
    cfg.metrics_table = required(root, "metrics_table", path.string());
    cfg.output_dir = root["output_dir"].value_or<std::string>("out");
    const auto base = path.parent_path();
    if (cfg.metrics_table.is_relative() && !base.empty()) {
        cfg.metrics_table = base / cfg.metrics_table;
    }
    return cfg;
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a_hex(std::string_view text) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
    return buf;
}

} // namespace sociocast::harness
