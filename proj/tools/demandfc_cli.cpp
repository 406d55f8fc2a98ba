// demandfc-cli: command-line front end over the demandfc C API.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "demandfc/demandfc.h"

namespace {

struct StageError {
    std::string stage;
    std::string message;
};

void check(dfc_status status, const std::string& stage) {
    if (status != DFC_OK) throw StageError{stage, dfc_last_error()};
}

// Stage of a failed pipeline run, recovered from the status code.
std::string run_stage(dfc_status status, const std::string& command) {
    switch (status) {
        case DFC_ERR_PARSE:
        case DFC_ERR_IO: return command == "boottest" ? "boottest" : "ingest";
        case DFC_ERR_POSITIVITY: return "boxcox";
        default: return command;
    }
}

struct ConfigDeleter {
    void operator()(dfc_config* c) const { dfc_config_free(c); }
};
struct SeriesDeleter {
    void operator()(dfc_series* s) const { dfc_series_free(s); }
};
struct DocumentDeleter {
    void operator()(dfc_document* d) const { dfc_document_free(d); }
};
using ConfigPtr = std::unique_ptr<dfc_config, ConfigDeleter>;
using SeriesPtr = std::unique_ptr<dfc_series, SeriesDeleter>;
using DocumentPtr = std::unique_ptr<dfc_document, DocumentDeleter>;

// Flags shared by the config-driven commands. Unset flags leave the config file value alone.
struct RunFlags {
    std::string config_file;
    std::string input;
    std::vector<std::string> orders;
    std::optional<int> window_from, window_to, window_step;
    std::optional<std::string> horizons, boxcox, metric, sample_span, eval_span, lambda_grid, bucket_seconds;
    std::optional<int> samples, threads;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    std::vector<std::string> settings;
    bool skip_empty = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_input) {
    cmd->add_option("--config", f.config_file, "key = value configuration file");
    if (with_input) cmd->add_option("input", f.input, "Trace CSV (timestamp,value)");
    cmd->add_option("--order", f.orders, "Model order p,d,q (repeatable)")->allow_extra_args(false);
    cmd->add_option("--window-from", f.window_from, "Smallest window length");
    cmd->add_option("--window-to", f.window_to, "Largest window length");
    cmd->add_option("--window-step", f.window_step, "Window length step");
    cmd->add_option("--horizons", f.horizons, "Forecast horizons, e.g. 1,2,3");
    cmd->add_option("--boxcox", f.boxcox, "Box-Cox lambda, auto or none");
    cmd->add_option("--lambda-grid", f.lambda_grid, "Grid for --boxcox auto, from:to:step");
    cmd->add_option("--samples", f.samples, "Bootstrap resamples n_s");
    cmd->add_option("--alpha", f.alpha, "Bootstrap significance level");
    cmd->add_option("--seed", f.seed, "Bootstrap seed");
    cmd->add_option("--metric", f.metric, "mse or relative")->check(CLI::IsMember({"mse", "relative"}));
    cmd->add_option("--sample-span", f.sample_span, "Identification span a:b (inclusive indices)");
    cmd->add_option("--eval-span", f.eval_span, "Evaluation span a:b (inclusive indices)");
    cmd->add_option("--bucket-seconds", f.bucket_seconds, "Aggregation bucket width in seconds");
    cmd->add_flag("--skip-empty", f.skip_empty, "Drop empty buckets instead of failing");
    cmd->add_option("--threads", f.threads, "Worker threads (0: all cores)");
    cmd->add_option("--output", f.output, "Report path; CSV files are written alongside");
    cmd->add_option("--set", f.settings, "Extra key=value config setting (repeatable)");
}

ConfigPtr build_config(const RunFlags& f) {
    dfc_config* raw = nullptr;
    check(dfc_config_create(&raw), "config");
    ConfigPtr cfg(raw);
    auto set = [&](const std::string& key, const std::string& value) {
        check(dfc_config_set(cfg.get(), key.c_str(), value.c_str()), "config");
    };
    if (!f.config_file.empty()) check(dfc_config_load_file(cfg.get(), f.config_file.c_str()), "config");
    for (const auto& kv : f.settings) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw StageError{"config", "--set expects key=value, got '" + kv + "'"};
        set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!f.input.empty()) set("input", f.input);
    if (!f.orders.empty()) {
        std::string joined;
        for (const auto& o : f.orders) joined += (joined.empty() ? "" : " ") + o;
        set("orders", joined);
    }
    if (f.window_from) set("window_from", std::to_string(*f.window_from));
    if (f.window_to) set("window_to", std::to_string(*f.window_to));
    if (f.window_step) set("window_step", std::to_string(*f.window_step));
    if (f.horizons) set("horizons", *f.horizons);
    if (f.boxcox) set("boxcox", *f.boxcox);
    if (f.lambda_grid) set("lambda_grid", *f.lambda_grid);
    if (f.samples) set("samples", std::to_string(*f.samples));
    if (f.alpha) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", *f.alpha);
        set("alpha", buf);
    }
    if (f.seed) set("seed", std::to_string(*f.seed));
    if (f.metric) set("metric", *f.metric);
    if (f.sample_span) set("sample_span", *f.sample_span);
    if (f.eval_span) set("eval_span", *f.eval_span);
    if (f.bucket_seconds) set("bucket_seconds", *f.bucket_seconds);
    if (f.skip_empty) set("skip_empty", "true");
    if (f.threads) set("threads", std::to_string(*f.threads));
    if (f.output) set("output", *f.output);
    return cfg;
}

void print_document(const dfc_document* doc, const std::optional<std::string>& output, bool show_table) {
    if (output && !output->empty()) {
        std::cerr << "wrote " << *output << '\n';
        if (show_table) std::cout << dfc_document_table(doc);
    } else {
        std::cout << dfc_document_text(doc);
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size() && !text.empty()) {
        const auto comma = text.find(',', pos);
        const std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw StageError{"simulate", "bad coefficient '" + item + "'"};
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

dfc_order parse_order_flag(const std::string& text, const std::string& stage) {
    dfc_order o{};
    char tail = 0;
    if (std::sscanf(text.c_str(), "%d,%d,%d%c", &o.p, &o.d, &o.q, &tail) != 3) {
        throw StageError{stage, "order must be p,d,q, got '" + text + "'"};
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ARIMA demand forecasting and model comparison"};
    app.require_subcommand(1);
    app.set_version_flag("--version", dfc_version());

    // ingest
    std::string ingest_input, ingest_output = "-";
    std::int64_t ingest_bucket = 3600;
    bool ingest_raw = false, ingest_skip = false;
    auto* ingest_cmd = app.add_subcommand("ingest", "Aggregate a raw trace into an hourly series CSV");
    ingest_cmd->add_option("input", ingest_input, "Trace CSV (timestamp,value)")->required();
    ingest_cmd->add_option("--bucket-seconds", ingest_bucket, "Bucket width in seconds");
    ingest_cmd->add_flag("--no-aggregate", ingest_raw, "Keep raw values (already regular data)");
    ingest_cmd->add_flag("--skip-empty", ingest_skip, "Drop empty buckets instead of failing");
    ingest_cmd->add_option("--output", ingest_output, "Output CSV ('-' for stdout)");

    RunFlags diag_flags, fit_flags, eval_flags, cmp_flags, boot_flags;
    auto* diag_cmd = app.add_subcommand("diagnose", "Summary, ADF, ACF/PACF, Ljung-Box and ARCH diagnostics");
    add_run_flags(diag_cmd, diag_flags, true);
    auto* fit_cmd = app.add_subcommand("fit", "Fit the configured orders and print the models");
    add_run_flags(fit_cmd, fit_flags, true);
    auto* eval_cmd = app.add_subcommand("evaluate", "Sliding-window forecast errors per model and horizon");
    add_run_flags(eval_cmd, eval_flags, true);
    auto* cmp_cmd = app.add_subcommand("compare", "Full comparison against the random walk benchmark");
    add_run_flags(cmp_cmd, cmp_flags, true);

    std::string boot_csv, boot_model;
    int boot_horizon = 0;
    auto* boot_cmd = app.add_subcommand("boottest", "Bootstrap test on a precomputed NDE CSV");
    add_run_flags(boot_cmd, boot_flags, false);
    boot_cmd->add_option("nde_csv", boot_csv, "CSV with an epsilon_hat column")->required();
    boot_cmd->add_option("--model", boot_model, "Keep rows of this model label");
    boot_cmd->add_option("--horizon", boot_horizon, "Keep rows of this horizon");

    std::string sim_order = "0,1,1", sim_ar, sim_ma, sim_output = "-";
    double sim_sigma = 1.0;
    std::size_t sim_n = 1000;
    std::uint64_t sim_seed = 1;
    std::int64_t sim_start = 0, sim_interval = 3600;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic ARIMA series");
    sim_cmd->add_option("--order", sim_order, "Model order p,d,q");
    sim_cmd->add_option("--ar", sim_ar, "AR coefficients, comma separated");
    sim_cmd->add_option("--ma", sim_ma, "MA coefficients (1 - theta B convention), comma separated");
    sim_cmd->add_option("--sigma", sim_sigma, "Innovation standard deviation");
    sim_cmd->add_option("-n,--length", sim_n, "Number of values");
    sim_cmd->add_option("--seed", sim_seed, "Random seed");
    sim_cmd->add_option("--start", sim_start, "First timestamp (epoch seconds)");
    sim_cmd->add_option("--interval", sim_interval, "Sampling interval in seconds");
    sim_cmd->add_option("--output", sim_output, "Output CSV ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest_cmd->parsed()) {
            dfc_series* raw = nullptr;
            std::size_t skipped = 0;
            check(dfc_ingest_csv(ingest_input.c_str(), ingest_bucket, ingest_raw ? 0 : 1, ingest_skip ? 1 : 0, &raw,
                                 &skipped),
                  "ingest");
            SeriesPtr series(raw);
            if (skipped > 0) std::cerr << "warning: skipped " << skipped << " empty buckets\n";
            check(dfc_series_write_csv(series.get(), ingest_output.c_str()), "ingest");
            return 0;
        }
        if (sim_cmd->parsed()) {
            const dfc_order order = parse_order_flag(sim_order, "simulate");
            const auto ar = parse_list(sim_ar);
            const auto ma = parse_list(sim_ma);
            if (ar.size() != static_cast<std::size_t>(order.p) || ma.size() != static_cast<std::size_t>(order.q)) {
                throw StageError{"simulate", "order " + sim_order + " needs " + std::to_string(order.p) +
                                                 " AR and " + std::to_string(order.q) + " MA coefficients"};
            }
            dfc_series* raw = nullptr;
            check(dfc_simulate(order, ar.data(), ma.data(), sim_sigma, sim_n, sim_seed, &raw), "simulate");
            SeriesPtr series(raw);
            dfc_series* shifted = nullptr;
            std::vector<double> values(sim_n);
            std::size_t needed = 0;
            check(dfc_series_values(series.get(), values.data(), values.size(), &needed), "simulate");
            check(dfc_series_create(values.data(), values.size(), sim_start, sim_interval, &shifted), "simulate");
            SeriesPtr out(shifted);
            check(dfc_series_write_csv(out.get(), sim_output.c_str()), "simulate");
            return 0;
        }

        struct Command {
            CLI::App* app;
            RunFlags* flags;
            const char* name;
        };
        const Command commands[] = {{diag_cmd, &diag_flags, "diagnose"},
                                    {fit_cmd, &fit_flags, "fit"},
                                    {eval_cmd, &eval_flags, "evaluate"},
                                    {cmp_cmd, &cmp_flags, "compare"},
                                    {boot_cmd, &boot_flags, "boottest"}};
        for (const auto& c : commands) {
            if (!c.app->parsed()) continue;
            const std::string name = c.name;
            auto cfg = build_config(*c.flags);
            dfc_document* raw = nullptr;
            dfc_status status = DFC_OK;
            if (name == "diagnose") status = dfc_run_diagnose(cfg.get(), &raw);
            if (name == "fit") status = dfc_run_fit(cfg.get(), &raw);
            if (name == "evaluate") status = dfc_run_evaluate(cfg.get(), &raw);
            if (name == "compare") status = dfc_run_compare(cfg.get(), &raw);
            if (name == "boottest") {
                status = dfc_run_boottest(cfg.get(), boot_csv.c_str(), boot_model.c_str(), boot_horizon, &raw);
            }
            check(status, run_stage(status, name));
            DocumentPtr doc(raw);
            print_document(doc.get(), c.flags->output, name == "compare");
            return 0;
        }
    } catch (const StageError& e) {
        std::cerr << "error [" << e.stage << "]: " << e.message << '\n';
        return 1;
    }
    return 0;
}
