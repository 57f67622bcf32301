#ifndef RETROMC_TABLES_HPP
#define RETROMC_TABLES_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "retromc/params.hpp"

namespace retromc {

// Versioned tolerance manifest; bump when any table tolerance changes.
extern const char* const kToleranceManifestVersion;

// Benchmark table: our numbers next to the reference numbers, one pass flag
// per row. CSV cells are deterministic (timings live in `timings`, printed to
// stdout only so repeated runs emit byte-identical CSV).
struct TableOutput {
    int id = 0;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<bool> pass;
    std::vector<double> timings; // seconds per row
    bool all_pass = true;
};

TableOutput cmd_table(int table_id, double scale, std::uint64_t seed, int workers);

std::string to_csv(const TableOutput& table);
void print_table(const TableOutput& table, std::ostream& os);

// Aligned histograms of the exactly-simulated underlying and the lognormal
// terminal price. CSV columns: bin_center, exact_count, lognormal_count.
struct HistogramOutput {
    std::vector<double> centers;
    std::vector<long> exact_counts;
    std::vector<long> lognormal_counts;
};

HistogramOutput cmd_histogram(const ModelParams& params, int bins, long n, std::uint64_t seed,
                              int workers);
std::string to_csv(const HistogramOutput& hist);

// RFC 4180 quoting for one cell.
std::string csv_escape(const std::string& field);
// fixed "%.10g" rendering used for all CSV numbers
std::string csv_num(double v);

// Acceptance-rate counters used by tables 2 and 4 (parallel, deterministic).
double exact_acceptance_rate(const ModelParams& params, long attempts, std::uint64_t seed,
                             int workers);
double h_acceptance_rate(const ModelParams& params, long attempts, std::uint64_t seed,
                         int workers);

} // namespace retromc

#endif
