#include "sociocast/core/io.hpp"
#include "sociocast/errors.hpp"
#include "sociocast/evaluation.hpp"
#include "sociocast/harness/config.hpp"
#include "sociocast/harness/pipeline.hpp"
#include "sociocast/harness/plots.hpp"
#include "sociocast/hawkes.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace sociocast;
using namespace sociocast::harness;

enum ExitCode { kOk = 0, kConfig = 1, kData = 2, kPartial = 3 };

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool strict = false;
    std::optional<std::string> protocol;
    std::optional<std::string> out;
    std::optional<std::size_t> workers;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--config", o.config, "Experiment TOML")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "Override the master seed");
    cmd->add_flag("--strict", o.strict, "Fail on the first malformed input line");
    cmd->add_option("--protocol", o.protocol, "Evaluation protocol")->check(CLI::IsMember({"long", "short"}));
    cmd->add_option("--out", o.out, "Override the output directory");
    cmd->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
}

ExperimentConfig resolve(const RunOptions& o) {
    ExperimentConfig cfg = load_config(o.config);
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    if (o.strict) {
        cfg.strict = true;
    }
    if (o.protocol) {
        cfg.protocol = parse_protocol(*o.protocol);
    }
    if (o.out) {
        cfg.output_dir = *o.out;
    }
    if (o.workers) {
        cfg.workers = *o.workers;
    }
    cfg.validate();
    return cfg;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) {
        std::cerr << "warning: " << w << '\n';
    }
}

int run_stage(const RunOptions& o, Stage stage) {
    const ExperimentConfig cfg = resolve(o);
    const RunManifest m = run_experiment(cfg, stage);
    print_warnings(m.warnings);
    std::size_t ok = 0;
    std::size_t failed = 0;
    for (const auto& t : m.tasks) {
        if (t.status == "failed") {
            ++failed;
            std::cerr << "failed: " << t.series << " " << t.model << ": " << t.error << '\n';
        } else if (t.status == "ok") {
            ++ok;
        }
        for (const auto& w : t.warnings) {
            std::cerr << "warning: " << t.series << " " << t.model << ": " << w << '\n';
        }
    }
    std::cout << to_string(stage) << ": " << ok << " tasks ok, " << failed << " failed; artifacts in "
              << cfg.output_dir.string() << '\n';
    return m.partial_failure() ? kPartial : kOk;
}

void print_summary(const std::filesystem::path& path) {
    if (std::filesystem::exists(path)) {
        std::cout << read_text_file(path);
    }
}

std::vector<MetricRow> load_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot read metrics table " + path.string());
    }
    return read_metric_rows(in);
}

int report(const std::optional<std::string>& config, const std::optional<std::string>& out_opt,
           std::optional<std::string> protocol) {
    std::optional<HeatmapSpec> heatmap;
    std::filesystem::path out = out_opt.value_or("out");
    if (config) {
        const ExperimentConfig cfg = load_config(*config);
        heatmap = cfg.heatmap;
        if (!out_opt) {
            out = cfg.output_dir;
        }
        if (!protocol) {
            protocol = std::string(to_string(cfg.protocol));
        }
    }
    std::optional<RunManifest> manifest;
    if (std::filesystem::exists(out / "manifest.json")) {
        manifest = RunManifest::from_json(read_text_file(out / "manifest.json"));
        if (!protocol) {
            protocol = std::string(to_string(manifest->protocol));
        }
    }
    std::vector<std::string> warnings;
    write_reports(load_rows(out / "metrics.csv"), heatmap, parse_protocol(protocol.value_or("long")), out, &warnings);
    if (manifest) {
        emit_plots(*manifest, out);
    }
    print_warnings(warnings);
    print_summary(out / "onme_summary.csv");
    return kOk;
}

int replay(const std::string& metrics, const std::string& out) {
    std::vector<std::string> warnings;
    write_reports(load_rows(metrics), std::nullopt, Protocol::long_term, out, &warnings);
    print_warnings(warnings);
    print_summary(std::filesystem::path(out) / "onme_summary.csv");
    return kOk;
}

struct SynthOptions {
    std::string out;
    std::string domain = "synthetic";
    std::string platform = "twitter";
    std::vector<std::string> topics{"topic"};
    std::string start = "2020-02-01";
    int days = 66;
    double mu = 0.5;
    double alpha = 0.5;
    double beta = 1.0;
    std::uint64_t seed = 0;
};

int synth(const SynthOptions& o) {
    const HawkesParams params{o.mu, o.alpha, o.beta};
    try {
        params.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    const EpochSeconds start = parse_date(o.start);
    const double hours = 24.0 * o.days;
    std::vector<EventRecord> records;
    for (std::size_t i = 0; i < o.topics.size(); ++i) {
        for (double t : simulate_hawkes(params, {}, 0.0, hours, derive_seed(o.seed, i))) {
            EventRecord r;
            r.timestamp = static_cast<double>(start) + t * static_cast<double>(kSecondsPerHour);
            r.platform = parse_platform(o.platform);
            r.topic = o.topics[i];
            r.domain = o.domain;
            records.push_back(std::move(r));
        }
    }
    std::ofstream out(o.out);
    if (!out) {
        throw DataError("cannot write " + o.out);
    }
    write_event_lines(out, records);
    std::cout << "wrote " << records.size() << " events to " << o.out << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Baseline forecasting and evaluation for social media activity"};
    app.require_subcommand(1);

    RunOptions run_opts;
    std::vector<std::pair<CLI::App*, Stage>> stages;
    for (const auto& [name, stage, help] :
         {std::tuple{"ingest", Stage::ingest, "Bin events into hourly series"},
          std::tuple{"fit", Stage::fit, "Fit every model on the training period"},
          std::tuple{"forecast", Stage::forecast, "Fit and forecast the test period"},
          std::tuple{"evaluate", Stage::evaluate, "Fit, forecast and score every forecast"},
          std::tuple{"run", Stage::report, "Full pipeline including reports and plots"}}) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_run_options(cmd, run_opts);
        stages.emplace_back(cmd, stage);
    }

    std::optional<std::string> report_config;
    std::optional<std::string> report_out;
    std::optional<std::string> report_protocol;
    CLI::App* report_cmd = app.add_subcommand("report", "Rebuild ONME tables, heatmaps and plots from a run directory");
    report_cmd->add_option("--config", report_config, "Experiment TOML (heatmap models, output directory)");
    report_cmd->add_option("--out", report_out, "Run directory holding metrics.csv");
    report_cmd->add_option("--protocol", report_protocol, "Protocol label for heatmap names")
        ->check(CLI::IsMember({"long", "short"}));

    std::string replay_metrics;
    std::string replay_config;
    std::optional<std::string> replay_out;
    CLI::App* replay_cmd = app.add_subcommand("replay-metrics", "ONME tables from an existing metrics CSV");
    auto* metrics_opt =
        replay_cmd->add_option("--metrics", replay_metrics, "domain,platform,topic,model,ape,rmse,smape,dtw,ve,ske table")
            ->check(CLI::ExistingFile);
    auto* replay_config_opt = replay_cmd->add_option("--config", replay_config, "TOML with metrics_table and output_dir")
                                  ->check(CLI::ExistingFile);
    metrics_opt->excludes(replay_config_opt);
    replay_cmd->add_option("--out", replay_out, "Output directory");

    SynthOptions synth_opts;
    CLI::App* synth_cmd = app.add_subcommand("synth", "Write simulated Hawkes events as JSON Lines");
    synth_cmd->add_option("--out", synth_opts.out, "Output .jsonl file")->required();
    synth_cmd->add_option("--domain", synth_opts.domain);
    synth_cmd->add_option("--platform", synth_opts.platform)->check(CLI::IsMember({"twitter", "youtube"}));
    synth_cmd->add_option("--topic", synth_opts.topics, "Repeat for several topics");
    synth_cmd->add_option("--start", synth_opts.start, "First day, YYYY-MM-DD");
    synth_cmd->add_option("--days", synth_opts.days)->check(CLI::PositiveNumber);
    synth_cmd->add_option("--mu", synth_opts.mu, "Background rate per hour");
    synth_cmd->add_option("--alpha", synth_opts.alpha, "Branching ratio");
    synth_cmd->add_option("--beta", synth_opts.beta, "Decay per hour");
    synth_cmd->add_option("--seed", synth_opts.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        for (const auto& [cmd, stage] : stages) {
            if (cmd->parsed()) {
                return run_stage(run_opts, stage);
            }
        }
        if (report_cmd->parsed()) {
            return report(report_config, report_out, report_protocol);
        }
        if (replay_cmd->parsed()) {
            if (!replay_config.empty()) {
                const ReplayConfig rc = load_replay_config(replay_config);
                return replay(rc.metrics_table.string(), replay_out.value_or(rc.output_dir.string()));
            }
            if (replay_metrics.empty()) {
                throw ConfigError("replay-metrics needs --metrics or --config");
            }
            return replay(replay_metrics, replay_out.value_or("out"));
        }
        if (synth_cmd->parsed()) {
            return synth(synth_opts);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
    return kConfig;
}
