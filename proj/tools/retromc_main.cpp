#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "retromc/experiment.hpp"
#include "retromc/params.hpp"
#include "retromc/runner.hpp"
#include "retromc/tables.hpp"

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw retromc::ConfigError("cannot open output file '" + path + "'");
    out << content;
}

std::string result_csv(const retromc::ExperimentConfig& cfg, const retromc::RunResult& res) {
    using retromc::csv_num;
    std::string out =
        "method,payoff,samples,seed,workers,price,se,ci_lo,ci_hi,acceptance_pct\r\n";
    out += retromc::method_to_string(cfg.method);
    out += ',' + cfg.payoff;
    out += ',' + std::to_string(res.n);
    out += ',' + std::to_string(cfg.seed);
    out += ',' + std::to_string(cfg.workers);
    out += ',' + csv_num(res.price);
    out += ',' + csv_num(res.std_error);
    out += ',' + csv_num(res.ci_lo);
    out += ',' + csv_num(res.ci_hi);
    out += ',';
    if (res.acceptance_rate) out += csv_num(100.0 * *res.acceptance_rate);
    out += "\r\n";
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"retromc - retrospective Monte Carlo pricer for averaged payoffs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string csv_path;
    std::uint64_t seed = 12345;
    int workers = 0;
    long samples = 0;
    std::string method;
    double scale = 1.0;
    int table_id = 1;
    int bins = 100;

    CLI::App* price = app.add_subcommand("price", "price one option configuration");
    price->add_option("--config", config_path, "config file (key=value lines)");
    price->add_option("--seed", seed, "RNG seed");
    price->add_option("--workers", workers, "worker threads (0 = hardware)");
    price->add_option("--samples", samples, "Monte Carlo samples");
    price->add_option("--method", method, "trap-kv|exact|ue-bound|ue-free|hybrid");
    price->add_option("--csv", csv_path, "write the result row as CSV");

    CLI::App* table = app.add_subcommand("table", "reproduce a benchmark table");
    table->add_option("id", table_id, "table id (1-4)")->required();
    table->add_option("--scale", scale, "sample-count scale factor in (0,1]");
    table->add_option("--seed", seed, "RNG seed");
    table->add_option("--workers", workers, "worker threads");
    table->add_option("--csv", csv_path, "write the table as CSV");

    CLI::App* histogram = app.add_subcommand("histogram", "exact-draw histogram data");
    histogram->add_option("--config", config_path, "config file (alpha > 0 model)");
    histogram->add_option("--bins", bins, "number of bins");
    histogram->add_option("--samples", samples, "draws per series");
    histogram->add_option("--seed", seed, "RNG seed");
    histogram->add_option("--workers", workers, "worker threads");
    histogram->add_option("--csv", csv_path, "write the histogram as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (price->parsed()) {
            retromc::ExperimentConfig cfg;
            if (!config_path.empty()) cfg = retromc::ExperimentConfig::from_file(config_path);
            if (price->count("--seed")) cfg.seed = seed;
            if (price->count("--workers")) cfg.workers = workers;
            if (price->count("--samples")) cfg.samples = samples;
            if (!method.empty()) cfg.method = retromc::method_from_string(method);
            if (!csv_path.empty()) cfg.csv_path = csv_path;
            cfg.validate();

            const retromc::RunResult res = retromc::run_experiment(cfg);
            std::printf("method=%s price=%.6f se=%.6f ci=[%.6f, %.6f] n=%ld wall=%.2fs",
                        retromc::method_to_string(cfg.method).c_str(), res.price, res.std_error,
                        res.ci_lo, res.ci_hi, res.n, res.wall_seconds);
            if (res.acceptance_rate) std::printf(" acceptance=%.4f%%", 100.0 * *res.acceptance_rate);
            std::printf("\n");
            if (!cfg.csv_path.empty()) write_file(cfg.csv_path, result_csv(cfg, res));
        } else if (table->parsed()) {
            const retromc::TableOutput out = retromc::cmd_table(table_id, scale, seed, workers);
            retromc::print_table(out, std::cout);
            if (!csv_path.empty()) write_file(csv_path, retromc::to_csv(out));
            // statistical misses are reported per row, never a hard failure
        } else if (histogram->parsed()) {
            retromc::ExperimentConfig cfg;
            if (!config_path.empty()) cfg = retromc::ExperimentConfig::from_file(config_path);
            const long n = samples > 0 ? samples : 100000;
            const retromc::HistogramOutput out =
                retromc::cmd_histogram(cfg.params, bins, n, seed, workers);
            const std::string csv = retromc::to_csv(out);
            if (!csv_path.empty()) write_file(csv_path, csv);
            else std::cout << csv;
        }
    } catch (const retromc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
