#include <cstdlib>
#include <fstream>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "sedfc/cli.hpp"

using namespace sedfc;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace

TEST_CASE("cli stats") {
    SECTION("text output carries the 4-decimal constants") {
        const auto r = run_cli({"stats", "--p0", "0.03", "--p1", "0.22"});
        REQUIRE(r.code == cli::kExitOk);
        CHECK(r.out.find("C        = 0.4998") != std::string::npos);
        CHECK(r.out.find("C1       = 3.1954") != std::string::npos);
        CHECK(r.out.find("C2       = 4.7004") != std::string::npos);
    }
    SECTION("bsc constants") {
        const auto r = run_cli({"stats", "--p0", "0.11", "--p1", "0.11"});
        REQUIRE(r.code == cli::kExitOk);
        CHECK(r.out.find("C        = 0.5001") != std::string::npos);
        CHECK(r.out.find("C1       = 2.3527") != std::string::npos);
        CHECK(r.out.find("C2       = 3.0163") != std::string::npos);
    }
    SECTION("csv and json formats") {
        const auto c = run_cli({"stats", "--p0", "0.11", "--p1", "0.11", "--format", "csv"});
        REQUIRE(c.code == cli::kExitOk);
        CHECK(c.out.rfind("p0,p1,relabel,C,C1,C2", 0) == 0);
        const auto j = run_cli({"stats", "--p0", "0.11", "--p1", "0.11", "--format", "json"});
        REQUIRE(j.code == cli::kExitOk);
        const auto parsed = nlohmann::json::parse(j.out);
        CHECK(parsed.at("relabel") == "none");
        CHECK(parsed.at("C").get<double>() == Catch::Approx(0.500084).margin(1e-5));
    }
    SECTION("relabeled channel reported") {
        const auto r = run_cli({"stats", "--p0", "0.78", "--p1", "0.97"});
        REQUIRE(r.code == cli::kExitOk);
        CHECK(r.out.find("swap_input") != std::string::npos);
    }
}

TEST_CASE("cli exit codes") {
    CHECK(run_cli({"stats", "--p0", "0.3"}).code == cli::kExitUsage);      // missing --p1
    CHECK(run_cli({"nonsense"}).code == cli::kExitUsage);
    CHECK(run_cli({}).code == cli::kExitUsage);
    CHECK(run_cli({"stats", "--p0", "0.3", "--p1", "0.7"}).code == cli::kExitDomain);
    CHECK(run_cli({"bounds", "--p0", "0.11", "--p1", "0.11", "--k", "4", "--epsilon",
                   "0.7"}).code == cli::kExitDomain);
    CHECK(run_cli({"simulate", "--p0", "0.11", "--p1", "0.11", "--k", "4", "--trials",
                   "20", "--max-steps", "1"}).code == cli::kExitAnomaly);
    CHECK(run_cli({"sweep", "--p0", "0.11", "--p1", "0.11", "--k", "9..3"}).code ==
          cli::kExitUsage);
    CHECK(run_cli({"--help"}).code == cli::kExitOk);
}

TEST_CASE("cli bounds") {
    const auto r = run_cli({"bounds", "--p0", "0.11", "--p1", "0.11", "--k", "1..4",
                            "--epsilon", "1e-3"});
    REQUIRE(r.code == cli::kExitOk);
    std::istringstream in(r.out);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "k,M,epsilon,bound_thm1,bound_cor1,bound_thm3,bound_thm6,converse_sup,"
          "converse_weak,converse");
    int rows = 0;
    for (std::string line; std::getline(in, line);) {
        const auto f = split_csv_line(line);
        REQUIRE(f.size() == 10);
        CHECK_FALSE(f[6].empty());  // thm6 present for a BSC
        ++rows;
    }
    CHECK(rows == 4);
}

TEST_CASE("cli sweep csv contract") {
    const std::vector<std::string> args{"sweep", "--p0", "0.11", "--p1", "0.11",
                                        "--k", "1..3", "--epsilon", "1e-3",
                                        "--trials", "200", "--seed", "7"};
    const auto r = run_cli(args);
    REQUIRE(r.code == cli::kExitOk);

    std::istringstream in(r.out);
    std::string header;
    std::getline(in, header);
    CHECK(header == kSweepCsvHeader);

    SECTION("fixed column count, empty runtime by default") {
        for (std::string line; std::getline(in, line);) {
            const auto f = split_csv_line(line);
            REQUIRE(f.size() == 15);
            CHECK(f[14].empty());      // runtime_s deterministic-empty
            CHECK_FALSE(f[12].empty()); // thm6 filled on a BSC
        }
    }
    SECTION("byte-identical across reruns and worker counts") {
        setenv("SED_THREADS", "1", 1);
        const auto a = run_cli(args);
        setenv("SED_THREADS", "3", 1);
        const auto b = run_cli(args);
        unsetenv("SED_THREADS");
        const auto c = run_cli(args);
        CHECK(a.out == b.out);
        CHECK(a.out == c.out);
        CHECK(a.code == cli::kExitOk);
    }
    SECTION("thm6 column empty for an asymmetric channel") {
        const auto bac = run_cli({"sweep", "--p0", "0.03", "--p1", "0.22", "--k", "1..2",
                                  "--trials", "100", "--seed", "3"});
        REQUIRE(bac.code == cli::kExitOk);
        std::istringstream bin(bac.out);
        std::string line;
        std::getline(bin, line);  // header
        while (std::getline(bin, line)) {
            const auto f = split_csv_line(line);
            REQUIRE(f.size() == 15);
            CHECK(f[12].empty());
        }
    }
    SECTION("emit-runtime fills the last column") {
        auto with_runtime = args;
        with_runtime.push_back("--emit-runtime");
        const auto rr = run_cli(with_runtime);
        REQUIRE(rr.code == cli::kExitOk);
        std::istringstream rin(rr.out);
        std::string line;
        std::getline(rin, line);
        std::getline(rin, line);
        CHECK_FALSE(split_csv_line(line)[14].empty());
    }
    SECTION("json mirrors the fields") {
        auto jargs = args;
        jargs.push_back("--format");
        jargs.push_back("json");
        const auto jr = run_cli(jargs);
        REQUIRE(jr.code == cli::kExitOk);
        const auto parsed = nlohmann::json::parse(jr.out);
        REQUIRE(parsed.is_array());
        REQUIRE(parsed.size() == 3);
        CHECK(parsed[0].at("k") == 1);
        CHECK(parsed[0].contains("bound_thm6"));
    }
}

TEST_CASE("sweep csv keeps the column count on error rows") {
    SweepRow ok;
    ok.k = 2;
    ok.M = 4;
    ok.epsilon = 1e-3;
    ok.trials = 10;
    ok.bounds.thm6_bsc = 12.5;
    SweepRow bad = ok;
    bad.error = "bound evaluation failed";
    std::ostringstream out;
    write_sweep_csv(out, {ok, bad});
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);  // header
    REQUIRE(split_csv_line(line).size() == 15);
    while (std::getline(in, line)) CHECK(split_csv_line(line).size() == 15);
}

TEST_CASE("cli simulate and firstpassage") {
    SECTION("simulate emits one csv row") {
        const auto r = run_cli({"simulate", "--p0", "0.11", "--p1", "0.11", "--k", "4",
                                "--trials", "500", "--seed", "11"});
        REQUIRE(r.code == cli::kExitOk);
        std::istringstream in(r.out);
        std::string header, row;
        REQUIRE(std::getline(in, header));
        REQUIRE(std::getline(in, row));
        CHECK(header.rfind("k,M,epsilon,trials,seed,avg_tau", 0) == 0);
        CHECK(split_csv_line(row)[0] == "4");
    }
    SECTION("firstpassage triple agrees") {
        const auto r = run_cli({"firstpassage", "--n", "3", "--p", "0.1", "--delta0", "5",
                                "--trials", "200000", "--seed", "5"});
        REQUIRE(r.code == cli::kExitOk);
        std::istringstream in(r.out);
        std::string header, row;
        std::getline(in, header);
        std::getline(in, row);
        const auto f = split_csv_line(row);
        const double closed = std::stod(f[3]);
        const double solved = std::stod(f[4]);
        const double mc = std::stod(f[5]);
        const double se = std::stod(f[6]);
        CHECK(closed == Catch::Approx(4.09327846).margin(1e-6));
        CHECK(solved == Catch::Approx(closed).margin(1e-9));
        CHECK(std::abs(mc - closed) <= 3.0 * se);
    }
    SECTION("output file matches stdout bytes") {
        const std::string path = "cli_test_sweep.csv";
        const std::vector<std::string> base{"sweep", "--p0", "0.11", "--p1", "0.11",
                                            "--k", "1..2", "--trials", "100",
                                            "--seed", "2"};
        const auto direct = run_cli(base);
        auto to_file = base;
        to_file.push_back("--output");
        to_file.push_back(path);
        const auto fr = run_cli(to_file);
        REQUIRE(fr.code == cli::kExitOk);
        std::ifstream in(path, std::ios::binary);
        std::stringstream content;
        content << in.rdbuf();
        CHECK(content.str() == direct.out);
        std::remove(path.c_str());
    }
}
