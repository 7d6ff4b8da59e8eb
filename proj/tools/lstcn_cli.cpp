// Command-line front end: train, tune, forecast, eval and explain.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lstcn/commands.hpp"
#include "lstcn/io.hpp"

namespace {

using namespace lstcn;

// Reads "key = value" lines; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string trimmed = CLI::detail::trim_copy(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw CLI::ConversionError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = CLI::detail::trim_copy(trimmed.substr(0, eq));
        std::string value = CLI::detail::trim_copy(trimmed.substr(eq + 1));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        for (char& c : key)
            if (c == '_') c = '-';
        out[key] = value;
    }
    return out;
}

// Fills options that were not given on the command line from the config file.
void apply_config(CLI::App& cmd, const std::string& config_path) {
    if (config_path.empty()) return;
    for (const auto& [key, value] : read_config_file(config_path)) {
        if (key == "config") continue;
        CLI::Option* opt = nullptr;
        try {
            opt = cmd.get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            throw CLI::ValidationError("config", "unknown key '" + key + "' for command '" + cmd.get_name() + "'");
        }
        if (opt->count() > 0) continue;
        if (opt->get_expected_max() > 1) {
            for (const auto& part : CLI::detail::split(value, ',')) opt->add_result(CLI::detail::trim_copy(part));
        } else {
            opt->add_result(value);
        }
        opt->run_callback();
    }
}

struct DataFlags {
    std::string delimiter = ",";
    std::string timestamp;
};

void add_data_options(CLI::App* cmd, DataSource& src, DataFlags& flags) {
    cmd->add_option("--data", src.path, "CSV file, one row per time step (header required)");
    cmd->add_option("--columns", src.columns, "Feature columns to use (comma separated); default: all")
        ->delimiter(',');
    cmd->add_option("--timestamp-column", flags.timestamp,
                    "Column ignored for the math but echoed in forecast output");
    cmd->add_option("--delimiter", flags.delimiter, "Field delimiter")->capture_default_str();
}

void finish_data(DataSource& src, const DataFlags& flags) {
    if (flags.delimiter.size() != 1) throw CLI::ValidationError("--delimiter", "must be a single character");
    src.delimiter = flags.delimiter[0];
    if (!flags.timestamp.empty()) src.timestamp_column = flags.timestamp;
}

void add_training_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("-L,--steps-ahead", cfg.steps_ahead, "Steps ahead to forecast (window length L)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", cfg.seed, "Seed for the prior-knowledge noise")->capture_default_str();
    cmd->add_option("--sigma", cfg.sigma, "Std. deviation of the prior-knowledge noise")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--window", cfg.window, "Moving-average window used for the prior")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--train-fraction", cfg.train_fraction, "Leading fraction of the series used for training")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
}

void print_train(const TrainSummary& s, const RunConfig& cfg) {
    std::printf("model written to %s\n", cfg.model_path.c_str());
    std::printf("features=%zu steps_ahead=%zu patches=%zu lambda=%g\n", s.model.n_features,
                s.model.steps_ahead, s.model.patches, s.model.lambda);
    std::printf("training steps=%zu test steps=%zu\n", s.train_steps, s.test_steps);
    for (std::size_t t = 0; t < s.model.per_patch_training_error.size(); ++t) {
        std::printf("patch %zu training MAE %.6g\n", t + 1, s.model.per_patch_training_error[t]);
    }
    std::printf("training time %.6f s\n", s.train_seconds);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Long short-term cognitive network forecaster"};
    app.require_subcommand(1);

    // train
    RunConfig train_cfg;
    DataFlags train_data;
    std::string train_config;
    std::string train_prior;
    auto* train = app.add_subcommand("train", "Fit a model and write it to --model");
    train->add_option("--config", train_config, "key = value file supplying any flag");
    add_data_options(train, train_cfg.data, train_data);
    add_training_options(train, train_cfg);
    train->add_option("-T,--patches", train_cfg.patches, "Number of time patches")->check(CLI::PositiveNumber);
    train->add_option("--lambda", train_cfg.lambda, "Ridge penalty")->check(CLI::NonNegativeNumber);
    train->add_option("--model", train_cfg.model_path, "Output model file");
    train->add_option("--prior", train_prior, "JSON file with w2/b2 initial knowledge (skips the smoothed fit)");

    // tune
    RunConfig tune_cfg;
    DataFlags tune_data;
    std::string tune_config;
    TuningGrid grid;
    TuningOptions tune_opts;
    std::string report_path = "tuning_report.csv";
    auto* tune_cmd = app.add_subcommand("tune", "Grid search over patches and lambda");
    tune_cmd->add_option("--config", tune_config, "key = value file supplying any flag");
    add_data_options(tune_cmd, tune_cfg.data, tune_data);
    add_training_options(tune_cmd, tune_cfg);
    tune_cmd->add_option("--patch-grid", grid.patch_counts, "Candidate patch counts")->delimiter(',');
    tune_cmd->add_option("--lambda-grid", grid.lambdas, "Candidate penalties")->delimiter(',');
    tune_cmd->add_option("--validation-fraction", grid.validation_fraction,
                         "Trailing fraction of training pairs held out for scoring")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    tune_cmd->add_option("--jobs", tune_opts.jobs, "Grid cells evaluated in parallel")->capture_default_str();
    tune_cmd->add_option("--report", report_path, "Output CSV with one row per grid cell")->capture_default_str();

    // forecast
    ForecastRequest fc;
    DataFlags fc_data;
    std::string fc_config;
    std::string fc_normalized;
    auto* fc_cmd = app.add_subcommand("forecast", "Forecast the steps following every window of a series");
    fc_cmd->add_option("--config", fc_config, "key = value file supplying any flag");
    fc_cmd->add_option("--model", fc.model_path, "Model file");
    add_data_options(fc_cmd, fc.data, fc_data);
    fc_cmd->add_option("--out", fc.out_path, "Output CSV in original units");
    fc_cmd->add_option("--normalized-out", fc_normalized, "Optional output CSV on the normalized scale");

    // eval
    EvalRequest ev;
    DataFlags ev_data;
    std::string ev_config;
    auto* ev_cmd = app.add_subcommand("eval", "Report train/test MAE next to the persistence baseline");
    ev_cmd->add_option("--config", ev_config, "key = value file supplying any flag");
    ev_cmd->add_option("--model", ev.model_path, "Model file");
    add_data_options(ev_cmd, ev.data, ev_data);
    ev_cmd->add_option("--train-fraction", ev.train_fraction, "Leading fraction used for training")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    ev_cmd->add_flag("--original-units", ev.original_units, "Report errors in original units");

    // explain
    ExplainRequest ex;
    std::string ex_config;
    std::string ex_source = "average";
    std::string ex_mode = "divisibility";
    auto* ex_cmd = app.add_subcommand("explain", "Export feature influence scores and weight histograms");
    ex_cmd->add_option("--config", ex_config, "key = value file supplying any flag");
    ex_cmd->add_option("--model", ex.model_path, "Model file");
    ex_cmd->add_option("--source", ex_source, "Weights to score: w1, w2 or average")
        ->check(CLI::IsMember({"w1", "w2", "average"}))
        ->capture_default_str();
    ex_cmd->add_option("--index-mode", ex_mode,
                       "Neuron-to-feature mapping: divisibility (p mod i == 0) or temporal (one per lag)")
        ->check(CLI::IsMember({"divisibility", "temporal"}))
        ->capture_default_str();
    ex_cmd->add_option("--bins", ex.bins, "Histogram bins")->capture_default_str()->check(CLI::PositiveNumber);
    ex_cmd->add_option("--output-prefix", ex.output_prefix,
                       "Prefix for influence_raw.csv, influence_normalized.csv, histogram_w1.csv, histogram_w2.csv");

    try {
        app.parse(argc, argv);
        auto require = [](CLI::App* cmd, const char* flag, const std::string& value) {
            if (value.empty()) throw CLI::RequiredError(std::string(flag) + " (command '" + cmd->get_name() + "')");
        };

        if (train->parsed()) {
            apply_config(*train, train_config);
            finish_data(train_cfg.data, train_data);
            require(train, "--data", train_cfg.data.path);
            require(train, "--model", train_cfg.model_path);
            if (!train_prior.empty()) train_cfg.prior_path = train_prior;
        } else if (tune_cmd->parsed()) {
            apply_config(*tune_cmd, tune_config);
            finish_data(tune_cfg.data, tune_data);
            require(tune_cmd, "--data", tune_cfg.data.path);
            grid.seed = tune_cfg.seed;
            tune_opts.sigma = tune_cfg.sigma;
            tune_opts.window = tune_cfg.window;
        } else if (fc_cmd->parsed()) {
            apply_config(*fc_cmd, fc_config);
            finish_data(fc.data, fc_data);
            require(fc_cmd, "--model", fc.model_path);
            require(fc_cmd, "--data", fc.data.path);
            require(fc_cmd, "--out", fc.out_path);
            if (!fc_normalized.empty()) fc.normalized_out_path = fc_normalized;
        } else if (ev_cmd->parsed()) {
            apply_config(*ev_cmd, ev_config);
            finish_data(ev.data, ev_data);
            require(ev_cmd, "--model", ev.model_path);
            require(ev_cmd, "--data", ev.data.path);
        } else if (ex_cmd->parsed()) {
            apply_config(*ex_cmd, ex_config);
            require(ex_cmd, "--model", ex.model_path);
            ex.source = *parse_weight_source(ex_source);
            ex.mode = *parse_index_set_mode(ex_mode);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (train->parsed()) {
            print_train(run_train(train_cfg), train_cfg);
        } else if (tune_cmd->parsed()) {
            const TuningResult r = run_tune(tune_cfg, grid, tune_opts, report_path);
            std::size_t skipped = 0;
            for (const auto& c : r.cells) skipped += c.status == CellStatus::skipped;
            std::printf("evaluated %zu cells (%zu skipped), report written to %s\n", r.cells.size(), skipped,
                        report_path.c_str());
            std::printf("best patches=%zu lambda=%g validation MAE=%.6g\n", r.best_patches, r.best_lambda,
                        r.best_mae);
        } else if (fc_cmd->parsed()) {
            const ForecastResult r = run_forecast(fc);
            std::printf("%zu forecast rows written to %s\n", r.original.rows(), fc.out_path.c_str());
        } else if (ev_cmd->parsed()) {
            const EvalReport r = run_eval(ev);
            const char* units = ev.original_units ? "original units" : "normalized";
            std::printf("MAE (%s)\n", units);
            std::printf("%-12s %10s %14s %14s\n", "segment", "pairs", "lstcn", "persistence");
            std::printf("%-12s %10zu %14.6g %14.6g\n", "train", r.train_pairs, r.train_mae, r.train_persistence_mae);
            if (r.test_mae) {
                std::printf("%-12s %10zu %14.6g %14.6g\n", "test", r.test_pairs, *r.test_mae, *r.test_persistence_mae);
            } else {
                std::printf("%-12s %10s %14s %14s\n", "test", "0", "n/a", "n/a");
            }
            std::printf("last patch MAE %.17g\n", r.last_patch_mae);
        } else if (ex_cmd->parsed()) {
            const ExplainResult r = run_explain(ex);
            for (const auto& path : r.written) std::printf("wrote %s\n", path.c_str());
        }
    } catch (const StageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
