#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "retromc/params.hpp"
#include "retromc/tables.hpp"

using retromc::cmd_table;
using retromc::TableOutput;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& csv) {
    std::vector<std::vector<std::string>> rows;
    std::string cell;
    std::vector<std::string> row;
    bool quoted = false;
    for (std::size_t i = 0; i < csv.size(); ++i) {
        const char c = csv[i];
        if (quoted) {
            if (c == '"' && i + 1 < csv.size() && csv[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            row.push_back(cell);
            cell.clear();
        } else if (c == '\r') {
            // consumed with the newline
        } else if (c == '\n') {
            row.push_back(cell);
            cell.clear();
            rows.push_back(row);
            row.clear();
        } else {
            cell += c;
        }
    }
    return rows;
}

} // namespace

TEST_CASE("csv escaping follows rfc 4180") {
    CHECK(retromc::csv_escape("plain") == "plain");
    CHECK(retromc::csv_escape("a,b") == "\"a,b\"");
    CHECK(retromc::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(retromc::csv_escape("line\nbreak") == "\"line\nbreak\"");
    CHECK(retromc::csv_num(11.46) == "11.46");
    CHECK(retromc::csv_num(0.0001) == "0.0001");
}

TEST_CASE("table command validation") {
    CHECK_THROWS_AS(cmd_table(5, 1.0, 1, 1), retromc::ConfigError);
    CHECK_THROWS_AS(cmd_table(0, 1.0, 1, 1), retromc::ConfigError);
    CHECK_THROWS_AS(cmd_table(1, 0.0, 1, 1), retromc::ConfigError);
    CHECK_THROWS_AS(cmd_table(1, 1.5, 1, 1), retromc::ConfigError);
}

TEST_CASE("table 1 smoke: structure, csv round trip, determinism") {
    const TableOutput a = cmd_table(1, 1e-4, 42, 2);
    CHECK(a.rows.size() == 6);
    CHECK(a.pass.size() == 6);
    CHECK(a.timings.size() == 6);
    for (const auto& row : a.rows) CHECK(row.size() == a.columns.size());

    const std::string csv = retromc::to_csv(a);
    const auto parsed = parse_csv(csv);
    REQUIRE(parsed.size() == 7); // header + 6 rows
    CHECK(parsed[0].size() == a.columns.size());
    // numeric cells reparse to identical strings
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
        for (std::size_t c = 0; c < a.rows[r].size(); ++c) {
            CHECK(parsed[r + 1][c] == a.rows[r][c]);
        }
    }

    const TableOutput b = cmd_table(1, 1e-4, 42, 2);
    CHECK(retromc::to_csv(b) == csv); // same seed, same workers: byte-identical

    const TableOutput c = cmd_table(1, 1e-4, 43, 2);
    CHECK(retromc::to_csv(c) != csv);

    std::ostringstream os;
    retromc::print_table(a, os);
    CHECK(os.str().find("table 1") != std::string::npos);
}

TEST_CASE("tables 2-4 smoke at tiny scale") {
    for (int id : {2, 3, 4}) {
        const TableOutput t = cmd_table(id, id == 3 ? 1e-3 : 1e-4, 7, 2);
        CHECK(t.id == id);
        CHECK(!t.rows.empty());
        for (const auto& row : t.rows) CHECK(row.size() == t.columns.size());
        const auto parsed = parse_csv(retromc::to_csv(t));
        CHECK(parsed.size() == t.rows.size() + 1);
    }
}

TEST_CASE("histogram command") {
    retromc::ModelParams p; // Table-1 parameters, alpha > 0
    const auto h = retromc::cmd_histogram(p, 40, 2000, 11, 2);
    CHECK(h.centers.size() == 40);
    long exact_total = 0, log_total = 0;
    for (const long c : h.exact_counts) exact_total += c;
    for (const long c : h.lognormal_counts) log_total += c;
    CHECK(exact_total == 2000);
    CHECK(log_total == 2000);

    const auto single = retromc::cmd_histogram(p, 1, 500, 11, 2);
    CHECK(single.exact_counts[0] == 500);
    CHECK(single.lognormal_counts[0] == 500);

    const auto parsed = parse_csv(retromc::to_csv(h));
    CHECK(parsed.size() == 41);
    CHECK(parsed[0][0] == "bin_center");

    retromc::ModelParams zero;
    zero.alpha = 0.0;
    zero.beta = 1.0;
    CHECK_THROWS_AS(retromc::cmd_histogram(zero, 10, 100, 1, 1), retromc::ConfigError);
    CHECK_THROWS_AS(retromc::cmd_histogram(p, 0, 100, 1, 1), retromc::ConfigError);
}
