#include "sociocast/harness/pipeline.hpp"

#include "sociocast/arima.hpp"
#include "sociocast/core/io.hpp"
#include "sociocast/ensemble.hpp"
#include "sociocast/errors.hpp"
#include "sociocast/harness/plots.hpp"
#include "sociocast/hawkes.hpp"
#include "sociocast/parallel.hpp"
#include "sociocast/shifted.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>

namespace sociocast::harness {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string slug(std::string_view text) {
    std::string out;
    for (char c : text) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                          c == '_' || c == '.';
        out.push_back(keep ? c : '_');
    }
    if (out.empty() || out == "." || out == "..") {
        out = "_" + out;
    }
    return out;
}

std::string rel(const std::filesystem::path& p) { return p.generic_string(); }

MetricVector select_metrics(const MetricVector& all, const std::vector<Metric>& selected) {
    MetricVector out;
    for (Metric m : selected) {
        out.set(m, all.get(m));
    }
    return out;
}

struct SeriesState {
    SeriesKey key;
    std::optional<SplitSeries> parts;
    std::vector<TaskRecord> tasks;
    std::vector<std::optional<BinnedSeries>> forecasts;
};

class SeriesRunner {
public:
    SeriesRunner(const ExperimentConfig& cfg, const EventLog& log, Stage stop_after, std::size_t inner_workers)
        : cfg_(cfg), log_(log), stop_after_(stop_after), inner_workers_(inner_workers) {}

    SeriesState run(const SeriesKey& key) {
        SeriesState state;
        state.key = key;
        const std::string label = key.label();
        const std::filesystem::path dir = key.dir();
        for (const auto& m : cfg_.models) {
            state.tasks.push_back({label, rel(dir), m.name, "skipped", "", {}, {}, 0.0});
        }
        state.forecasts.resize(cfg_.models.size());

        std::string series_csv;
        try {
            const BinnedSeries whole = bin_events(log_, cfg_.split.whole(), cfg_.bin_width);
            state.parts = split_series(whole, cfg_.split);
            series_csv = rel("series" / dir / "counts.csv");
            write_series_csv(cfg_.output_dir / series_csv, whole);
            if (stop_after_ >= Stage::forecast) {
                write_series_csv(cfg_.output_dir / "forecasts" / dir / "gt.csv", state.parts->test);
            }
        } catch (const Error& e) {
            for (auto& t : state.tasks) {
                t.status = "failed";
                t.error = e.what();
            }
            return state;
        }
        if (stop_after_ == Stage::ingest) {
            state.tasks.front().artifacts.push_back(series_csv);
            return state;
        }

        for (std::size_t i = 0; i < cfg_.models.size(); ++i) {
            const auto t0 = Clock::now();
            TaskRecord& rec = state.tasks[i];
            try {
                std::optional<BinnedSeries> fc = run_model(cfg_.models[i], state, rec);
                if (fc) {
                    const std::string path = rel("forecasts" / dir / (cfg_.models[i].name + ".csv"));
                    write_series_csv(cfg_.output_dir / path, *fc);
                    rec.artifacts.push_back(path);
                    state.forecasts[i] = std::move(fc);
                }
                rec.status = "ok";
            } catch (const std::exception& e) {
                rec.status = "failed";
                rec.error = e.what();
            }
            rec.seconds = seconds_since(t0);
        }
        return state;
    }

private:
    [[nodiscard]] bool forecasting() const { return stop_after_ >= Stage::forecast; }

    std::optional<BinnedSeries> run_model(const ModelSpec& m, const SeriesState& state, TaskRecord& rec) {
        const SplitSeries& parts = *state.parts;
        const BinnedSeries history = concatenate(parts.train, parts.validation);
        const std::size_t horizon = parts.test.size();
        const std::filesystem::path model_dir = "models" / state.key.dir();

        switch (m.kind) {
        case ModelKind::shifted:
            if (!forecasting()) {
                return std::nullopt;
            }
            if (cfg_.protocol == Protocol::long_term) {
                return shifted_forecast(history, horizon);
            }
            return rolling_shifted_forecast(history, parts.test, cfg_.short_block);

        case ModelKind::arima: {
            ArimaOrder order;
            if (m.order) {
                order = *m.order;
            } else {
                const GridSearchResult gs =
                    grid_search_arima(parts.train.values(), parts.validation.values(), m.grid, inner_workers_);
                order = gs.best;
                const std::string path = rel(model_dir / (m.name + "_grid.csv"));
                write_text_file(cfg_.output_dir / path, grid_scores_csv(gs));
                rec.artifacts.push_back(path);
                for (const auto& [o, why] : gs.failures) {
                    rec.warnings.push_back("order " + to_string(o) + " failed: " + why);
                }
            }
            const ArimaModel model = fit_arima_with_fallback(parts.train.values(), order);
            const std::string path = rel(model_dir / (m.name + ".json"));
            write_text_file(cfg_.output_dir / path, arima_model_to_json(model));
            rec.artifacts.push_back(path);
            if (!forecasting()) {
                return std::nullopt;
            }
            return forecast_arima(model, history, horizon, cfg_.protocol, &parts.test, cfg_.short_block);
        }

        case ModelKind::hawkes: {
            const TimeRange train = cfg_.split.train();
            const auto origin = static_cast<double>(train.start);
            std::vector<double> hours;
            for (double t : log_.in_window(train)) {
                hours.push_back((t - origin) / static_cast<double>(kSecondsPerHour));
            }
            const double end = static_cast<double>(train.length()) / static_cast<double>(kSecondsPerHour);
            const HawkesFit fit = fit_hawkes_em(hours, end, default_hawkes_init(hours, end), {m.tol, m.max_iter});
            if (fit.criticality_warning) {
                rec.warnings.push_back("branching ratio reached the subcritical cap");
            }
            if (!fit.converged) {
                rec.warnings.push_back("EM stopped at max_iter before converging");
            }
            const std::string path = rel(model_dir / (m.name + ".json"));
            write_text_file(cfg_.output_dir / path, hawkes_fit_to_json(fit));
            rec.artifacts.push_back(path);
            if (!forecasting()) {
                return std::nullopt;
            }

            const std::uint64_t seed = derive_seed(cfg_.seed, fnv1a(state.key.label() + "\n" + m.name));
            const EpochSeconds start = cfg_.split.test().start;
            if (cfg_.protocol == Protocol::long_term) {
                return hawkes_forecast(fit.params, log_.before(static_cast<double>(start)), start, horizon,
                                       cfg_.bin_width, {m.n_sims, seed, inner_workers_});
            }
            std::vector<double> counts;
            counts.reserve(horizon);
            const std::size_t blocks = horizon / cfg_.short_block;
            for (std::size_t j = 0; j < blocks; ++j) {
                const EpochSeconds block_start =
                    start + static_cast<EpochSeconds>(j * cfg_.short_block) * cfg_.bin_width;
                const BinnedSeries part =
                    hawkes_forecast(fit.params, log_.before(static_cast<double>(block_start)), block_start,
                                    cfg_.short_block, cfg_.bin_width, {m.n_sims, derive_seed(seed, j), inner_workers_});
                counts.insert(counts.end(), part.values().begin(), part.values().end());
            }
            return BinnedSeries(start, cfg_.bin_width, std::move(counts));
        }

        case ModelKind::ensemble: {
            if (!forecasting()) {
                return std::nullopt;
            }
            std::vector<EnsembleComponent> comps;
            for (const auto& name : m.components) {
                const auto it = std::find_if(cfg_.models.begin(), cfg_.models.end(),
                                             [&](const ModelSpec& s) { return s.name == name; });
                const auto& fc = state.forecasts[static_cast<std::size_t>(it - cfg_.models.begin())];
                if (!fc) {
                    throw Error("component '" + name + "' has no forecast");
                }
                comps.push_back({name, *fc});
            }
            return ensemble_forecast(comps, m.weights);
        }
        }
        throw ContractError("unknown model kind");
    }

    const ExperimentConfig& cfg_;
    const EventLog& log_;
    Stage stop_after_;
    std::size_t inner_workers_;
};

BinnedSeries sum_series(const std::vector<const BinnedSeries*>& parts) {
    std::vector<double> total(parts.front()->size(), 0.0);
    for (const BinnedSeries* s : parts) {
        if (!s->aligned_with(*parts.front())) {
            throw AlignmentError("cannot sum misaligned series");
        }
        for (std::size_t k = 0; k < total.size(); ++k) {
            total[k] += (*s)[k];
        }
    }
    return BinnedSeries(parts.front()->start(), parts.front()->bin_width(), std::move(total));
}

std::vector<MetricRow> score(const ExperimentConfig& cfg, const std::vector<SeriesState>& states,
                             std::vector<std::string>& warnings) {
    std::vector<MetricRow> rows;
    for (const auto& s : states) {
        for (std::size_t i = 0; i < cfg.models.size(); ++i) {
            if (!s.forecasts[i]) {
                continue;
            }
            const MetricVector mv = evaluate_metrics(SeriesPair(s.parts->test, *s.forecasts[i]));
            rows.push_back({s.key.domain, std::string(to_string(s.key.platform)), s.key.topic, cfg.models[i].name,
                            select_metrics(mv, cfg.metrics)});
        }
    }

    // Aggregate rows: summed series over every topic of a (domain, platform).
    std::map<std::pair<std::string, Platform>, std::vector<const SeriesState*>> groups;
    for (const auto& s : states) {
        groups[{s.key.domain, s.key.platform}].push_back(&s);
    }
    for (const auto& [gk, members] : groups) {
        std::vector<const BinnedSeries*> gts;
        for (const SeriesState* s : members) {
            if (s->parts) {
                gts.push_back(&s->parts->test);
            }
        }
        if (gts.size() != members.size()) {
            warnings.push_back(gk.first + "/" + std::string(to_string(gk.second)) +
                               ": aggregate skipped because a series could not be binned");
            continue;
        }
        const BinnedSeries gt = sum_series(gts);
        for (std::size_t i = 0; i < cfg.models.size(); ++i) {
            std::vector<const BinnedSeries*> fcs;
            for (const SeriesState* s : members) {
                if (s->forecasts[i]) {
                    fcs.push_back(&*s->forecasts[i]);
                }
            }
            if (fcs.size() != members.size()) {
                warnings.push_back(gk.first + "/" + std::string(to_string(gk.second)) + ": model '" +
                                   cfg.models[i].name + "' left out of the aggregate (missing forecasts)");
                continue;
            }
            const MetricVector mv = evaluate_metrics(SeriesPair(gt, sum_series(fcs)));
            rows.push_back({gk.first, std::string(to_string(gk.second)), std::string(kAllTopics), cfg.models[i].name,
                            select_metrics(mv, cfg.metrics)});
        }
    }
    return rows;
}

std::vector<OnmeReport> report_groups(const std::vector<ModelErrorTable>& tables, std::vector<std::string>& warnings) {
    std::vector<OnmeReport> reports;
    for (const auto& t : tables) {
        try {
            t.validate();
        } catch (const ContractError& e) {
            warnings.push_back("skipped " + std::string(e.what()));
            continue;
        }
        reports.push_back(onme_report(t));
        for (const auto& w : reports.back().normalized.warnings) {
            warnings.push_back(w);
        }
    }
    return reports;
}

json task_to_json(const TaskRecord& t) {
    return json{{"series", t.series},     {"dir", t.dir},           {"model", t.model},
                {"status", t.status},     {"error", t.error},       {"warnings", t.warnings},
                {"artifacts", t.artifacts}, {"seconds", t.seconds}};
}

Stage parse_stage(std::string_view s) {
    for (Stage st : {Stage::ingest, Stage::fit, Stage::forecast, Stage::evaluate, Stage::report}) {
        if (to_string(st) == s) {
            return st;
        }
    }
    throw DataError("unknown stage '" + std::string(s) + "'");
}

} // namespace

std::string SeriesKey::label() const { return domain + "/" + std::string(to_string(platform)) + "/" + topic; }

std::filesystem::path SeriesKey::dir() const {
    return std::filesystem::path(slug(domain)) / std::string(to_string(platform)) / slug(topic);
}

IngestResult ingest(const ExperimentConfig& config) {
    IngestResult result;
    std::map<SeriesKey, std::vector<double>> grouped;
    for (const auto& ds : config.datasets) {
        std::ifstream in(ds.path);
        if (!in) {
            throw DataError("cannot read dataset " + ds.path.string());
        }
        EventParseResult parsed = read_event_lines(in, config.strict, ds.path.string());
        result.malformed += parsed.malformed;
        for (auto& w : parsed.warnings) {
            result.warnings.push_back(std::move(w));
        }
        const std::set<std::string> wanted(ds.topics.begin(), ds.topics.end());
        std::size_t ignored = 0;
        for (const auto& r : parsed.records) {
            if (r.domain != ds.domain || r.platform != ds.platform) {
                ++ignored;
                continue;
            }
            if (!wanted.empty() && wanted.count(r.topic) == 0) {
                continue;
            }
            grouped[{ds.domain, ds.platform, r.topic}].push_back(r.timestamp);
            ++result.events;
        }
        if (ignored > 0) {
            result.warnings.push_back(ds.path.string() + ": ignored " + std::to_string(ignored) +
                                      " events from another domain or platform");
        }
        for (const auto& topic : ds.topics) {
            if (grouped.count({ds.domain, ds.platform, topic}) == 0) {
                throw DataError("missing topic '" + topic + "' for " + ds.domain + "/" +
                                std::string(to_string(ds.platform)) + " in " + ds.path.string());
            }
        }
    }
    for (auto& [key, ts] : grouped) {
        result.logs.emplace(key, EventLog(std::move(ts), key.platform, key.domain, key.topic));
    }
    return result;
}

std::string_view to_string(Stage stage) {
    switch (stage) {
    case Stage::ingest:
        return "ingest";
    case Stage::fit:
        return "fit";
    case Stage::forecast:
        return "forecast";
    case Stage::evaluate:
        return "evaluate";
    case Stage::report:
        return "report";
    }
    return "?";
}

bool RunManifest::partial_failure() const {
    return std::any_of(tasks.begin(), tasks.end(), [](const TaskRecord& t) { return t.status == "failed"; });
}

std::string RunManifest::to_json() const {
    json tasks_json = json::array();
    for (const auto& t : tasks) {
        tasks_json.push_back(task_to_json(t));
    }
    const json j{{"config_hash", config_hash}, {"seed", seed},           {"protocol", std::string(to_string(protocol))},
                 {"stage", std::string(harness::to_string(stage))},      {"seconds", seconds},
                 {"tasks", tasks_json},        {"artifacts", artifacts}, {"warnings", warnings}};
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(std::string_view text) {
    RunManifest m;
    try {
        const json j = json::parse(text);
        m.config_hash = j.at("config_hash").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.protocol = parse_protocol(j.at("protocol").get<std::string>());
        m.stage = parse_stage(j.at("stage").get<std::string>());
        m.seconds = j.value("seconds", 0.0);
        for (const auto& t : j.at("tasks")) {
            m.tasks.push_back({t.at("series").get<std::string>(), t.at("dir").get<std::string>(),
                               t.at("model").get<std::string>(), t.at("status").get<std::string>(),
                               t.value("error", std::string()), t.value("warnings", std::vector<std::string>{}),
                               t.value("artifacts", std::vector<std::string>{}), t.value("seconds", 0.0)});
        }
        m.artifacts = j.value("artifacts", std::vector<std::string>{});
        m.warnings = j.value("warnings", std::vector<std::string>{});
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid manifest: ") + e.what());
    }
    return m;
}

std::vector<std::string> write_reports(const std::vector<MetricRow>& rows, const std::optional<HeatmapSpec>& heatmap,
                                       Protocol protocol, const std::filesystem::path& out_dir,
                                       std::vector<std::string>* warnings) {
    std::vector<std::string> local;
    std::vector<std::string>& warn = warnings != nullptr ? *warnings : local;
    std::vector<std::string> written;

    std::vector<MetricRow> aggregate;
    std::vector<MetricRow> topics;
    for (const auto& r : rows) {
        (r.topic == kAllTopics ? aggregate : topics).push_back(r);
    }
    // A plain table without aggregate rows is taken as one row per model and group.
    if (aggregate.empty()) {
        aggregate = rows;
    }

    const std::vector<OnmeReport> reports = report_groups(group_metric_rows(aggregate, false), warn);
    write_text_file(out_dir / "onme.csv", onme_csv(reports));
    written.emplace_back("onme.csv");
    if (!reports.empty()) {
        try {
            write_text_file(out_dir / "onme_summary.csv", onme_summary_csv(onme_summary(reports)));
            written.emplace_back("onme_summary.csv");
        } catch (const CoverageError& e) {
            warn.push_back(std::string("no ONME summary: ") + e.what());
        }
    }
    if (!topics.empty()) {
        write_text_file(out_dir / "onme_topics.csv", onme_csv(report_groups(group_metric_rows(topics, true), warn)));
        written.emplace_back("onme_topics.csv");
    }

    if (!heatmap || topics.empty()) {
        return written;
    }
    std::vector<std::string> platforms;
    for (const auto& r : topics) {
        if (std::find(platforms.begin(), platforms.end(), r.platform) == platforms.end()) {
            platforms.push_back(r.platform);
        }
    }
    std::vector<Metric> metrics;
    for (Metric m : kAllMetrics) {
        if (std::any_of(topics.begin(), topics.end(), [m](const MetricRow& r) { return r.metrics.get(m).has_value(); })) {
            metrics.push_back(m);
        }
    }
    for (const auto& platform : platforms) {
        std::set<std::string> domains;
        for (const auto& r : topics) {
            if (r.platform == platform) {
                domains.insert(r.domain);
            }
        }
        std::vector<TopicComparison> comps;
        for (const auto& r : topics) {
            if (r.platform != platform || r.model != heatmap->base) {
                continue;
            }
            const auto ch = std::find_if(topics.begin(), topics.end(), [&](const MetricRow& c) {
                return c.platform == platform && c.domain == r.domain && c.topic == r.topic &&
                       c.model == heatmap->challenger;
            });
            if (ch == topics.end()) {
                continue;
            }
            comps.push_back({domains.size() > 1 ? r.domain + "/" + r.topic : r.topic, r.metrics, ch->metrics});
        }
        if (comps.empty()) {
            warn.push_back("no heatmap for " + platform + ": no topic has both '" + heatmap->base + "' and '" +
                           heatmap->challenger + "'");
            continue;
        }
        const Heatmap hm = build_heatmap(heatmap->challenger + " vs " + heatmap->base + " (" + platform + ", " +
                                             std::string(to_string(protocol)) + "-term)",
                                         comps, metrics);
        const std::string stem = "heatmap_" + slug(platform) + "_" + std::string(to_string(protocol));
        write_text_file(out_dir / (stem + ".csv"), heatmap_csv(hm));
        write_text_file(out_dir / (stem + ".svg"), heatmap_svg(hm));
        written.push_back(stem + ".csv");
        written.push_back(stem + ".svg");
    }
    return written;
}

RunManifest run_experiment(const ExperimentConfig& config, Stage stop_after) {
    const auto t0 = Clock::now();
    config.validate();
    RunManifest manifest;
    manifest.config_hash = config.source_hash;
    manifest.seed = config.seed;
    manifest.protocol = config.protocol;
    manifest.stage = stop_after;

    std::filesystem::create_directories(config.output_dir);
    IngestResult ingested = ingest(config);
    manifest.warnings = std::move(ingested.warnings);
    if (ingested.logs.empty()) {
        throw DataError("no events matched any configured dataset");
    }

    std::vector<std::pair<SeriesKey, const EventLog*>> series;
    for (const auto& [key, log] : ingested.logs) {
        series.emplace_back(key, &log);
    }
    const std::size_t outer = config.workers;
    const std::size_t inner = series.size() > 1 ? 1 : config.workers;
    std::vector<SeriesState> states(series.size());
    parallel_for(
        series.size(),
        [&](std::size_t i) {
            SeriesRunner runner(config, *series[i].second, stop_after, inner);
            states[i] = runner.run(series[i].first);
        },
        outer);

    for (const auto& s : states) {
        for (const auto& t : s.tasks) {
            manifest.tasks.push_back(t);
        }
    }

    if (stop_after >= Stage::evaluate) {
        const std::vector<MetricRow> rows = score(config, states, manifest.warnings);
        write_text_file(config.output_dir / "metrics.csv", metric_rows_csv(rows));
        manifest.artifacts.emplace_back("metrics.csv");
        if (stop_after >= Stage::report) {
            for (auto& a : write_reports(rows, config.heatmap, config.protocol, config.output_dir, &manifest.warnings)) {
                manifest.artifacts.push_back(std::move(a));
            }
        }
    }
    if (stop_after >= Stage::report) {
        for (auto& a : emit_plots(manifest, config.output_dir)) {
            manifest.artifacts.push_back(std::move(a));
        }
    }

    manifest.seconds = seconds_since(t0);
    manifest.artifacts.emplace_back("manifest.json");
    write_text_file(config.output_dir / "manifest.json", manifest.to_json());
    return manifest;
}

} // namespace sociocast::harness
