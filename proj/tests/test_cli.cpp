#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "kreg/csv.hpp"

namespace fs = std::filesystem;
using testutil::TempDir;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(KREG_CLI_PATH) + " " + args;
    int status = std::system(cmd.c_str());
    if (status < 0) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_data_rows(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t rows = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        ++rows;
    }
    return rows;
}

void write_fig2(const fs::path& p) {
    std::ofstream out(p);
    out << "x1,y,w\n1,100,1\n2,40,1\n3,0,1\n15,50,1\n16,50,1\n17,50,1\n";
}

}  // namespace

TEST_CASE("synth emits the requested number of rows deterministically") {
    TempDir tmp;
    auto a = tmp.path / "a.csv";
    auto b = tmp.path / "b.csv";
    std::string args = "synth --n 1000 --c 0 --phi 1 --y0 10 --noise 1 --seed 7 --out ";
    REQUIRE(run_cli(args + a.string()) == 0);
    REQUIRE(run_cli(args + b.string()) == 0);
    CHECK(count_data_rows(a) == 1000);
    CHECK(slurp(a) == slurp(b));  // byte-identical
    REQUIRE(run_cli("synth --n 1000 --seed 8 --out " + b.string()) == 0);
    CHECK(slurp(a) != slurp(b));
}

TEST_CASE("build ga on the two-cluster toy file matches its hand-computed coreset byte-for-byte") {
    TempDir tmp;
    auto in = tmp.path / "fig2.csv";
    auto out = tmp.path / "q.csv";
    write_fig2(in);
    REQUIRE(run_cli("build --method ga --gamma 2 --in " + in.string() + " --out " +
                    out.string() + " 2>/dev/null") == 0);
    std::ifstream f(out);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(f, line))
        if (!line.empty() && line.front() != '#') rows.push_back(line);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "x1,y,w");
    CHECK(rows[1] == "1.5,70,2");
    CHECK(rows[2] == "3,0,1");
    CHECK(rows[3] == "15.5,50,2");
    CHECK(rows[4] == "17,50,1");
    // provenance lines are present
    std::string all = slurp(out);
    CHECK(all.find("# method=g-aggregate gamma=2") != std::string::npos);
}

TEST_CASE("unknown flags exit 1 and produce no output file") {
    TempDir tmp;
    auto out = tmp.path / "never.csv";
    CHECK(run_cli("synth --n 10 --bogus 1 --out " + out.string() + " 2>/dev/null") == 1);
    CHECK(!fs::exists(out));
    CHECK(run_cli("2>/dev/null") == 1);  // missing subcommand
}

TEST_CASE("data errors exit 2") {
    TempDir tmp;
    CHECK(run_cli("build --method ga --gamma 2 --in " + (tmp.path / "nope.csv").string() +
                  " 2>/dev/null") == 2);
    // usage-level parameter problems exit 1
    auto in = tmp.path / "fig2.csv";
    write_fig2(in);
    CHECK(run_cli("build --method ga --in " + in.string() + " 2>/dev/null") == 1);
}

TEST_CASE("build routes eps/rho through the derived gamma") {
    TempDir tmp;
    auto in = tmp.path / "fig2.csv";
    auto out = tmp.path / "cs.csv";
    write_fig2(in);
    REQUIRE(run_cli("build --method ga --eps 0.5 --rho 0.1 --sigma 1 --in " +
                    in.string() + " --out " + out.string() + " 2>/dev/null") == 0);
    // gamma = 0.5*1*0.1/8 = 0.00625, far below the point spacing: 6 rows
    CHECK(count_data_rows(out) == 6);
    std::string all = slurp(out);
    CHECK(all.find("gamma=0.00625") != std::string::npos);
}

TEST_CASE("eval pointwise rows carry a defined flag") {
    TempDir tmp;
    auto in = tmp.path / "fig2.csv";
    auto q = tmp.path / "q.csv";
    auto out = tmp.path / "vals.csv";
    write_fig2(in);
    std::ofstream(q) << "x1\n3\n13\n1000\n";
    REQUIRE(run_cli("eval --in " + in.string() + " --sigma 1 --queries " + q.string() +
                    " --truncate 10sigma --out " + out.string()) == 0);
    std::ifstream f(out);
    std::string line;
    std::getline(f, line);
    CHECK(line == "q1,value,defined");
    std::getline(f, line);
    CHECK(line.substr(0, 2) == "3,");
    CHECK(line.back() == '1');
    std::getline(f, line);  // q=13: regression of the right cluster
    CHECK(line.find(",1") != std::string::npos);
    CHECK(line.rfind("13,50", 0) == 0);
    std::getline(f, line);  // q=1000 is beyond any 10-sigma window
    CHECK(line == "1000,nan,0");
}

TEST_CASE("eval against a coreset emits an error report") {
    TempDir tmp;
    auto in = tmp.path / "p.csv";
    auto cs = tmp.path / "s.csv";
    auto rep = tmp.path / "rep.csv";
    auto rep2 = tmp.path / "rep2.csv";
    REQUIRE(run_cli("synth --n 5000 --seed 3 --out " + in.string()) == 0);
    REQUIRE(run_cli("build --method ga --gamma 25 --in " + in.string() + " --out " +
                    cs.string() + " 2>/dev/null") == 0);
    REQUIRE(run_cli("eval --in " + in.string() + " --coreset " + cs.string() +
                    " --sigma 50 --queries random:2000 --seed 5 --out " +
                    rep.string()) == 0);
    std::ifstream f(rep);
    std::string header, row;
    std::getline(f, header);
    std::getline(f, row);
    CHECK(header.rfind("linf,linf_norm,argmax_x1,", 0) == 0);
    CHECK(!row.empty());

    // rerun: data columns identical (timings differ)
    REQUIRE(run_cli("eval --in " + in.string() + " --coreset " + cs.string() +
                    " --sigma 50 --queries random:2000 --seed 5 --out " +
                    rep2.string()) == 0);
    auto strip_times = [](const fs::path& p) {
        std::ifstream in2(p);
        std::string h, r;
        std::getline(in2, h);
        std::getline(in2, r);
        // drop the three trailing timing columns
        for (int i = 0; i < 3; ++i) r.erase(r.rfind(','));
        return r;
    };
    CHECK(strip_times(rep) == strip_times(rep2));
}

TEST_CASE("thread count changes neither values nor exit status") {
    TempDir tmp;
    auto in = tmp.path / "p.csv";
    auto a = tmp.path / "a.csv";
    auto b = tmp.path / "b.csv";
    auto c = tmp.path / "c.csv";
    REQUIRE(run_cli("synth --n 3000 --seed 1 --out " + in.string()) == 0);
    std::string base = "eval --in " + in.string() +
                       " --sigma 40 --queries random:2000 --seed 2 --out ";
    REQUIRE(run_cli(base + a.string() + " --threads 1") == 0);
    REQUIRE(run_cli(base + b.string() + " --threads 4") == 0);
    CHECK(slurp(a) == slurp(b));
    // KREG_THREADS is honored as the --threads fallback
    int status = std::system(("env KREG_THREADS=3 " + std::string(KREG_CLI_PATH) +
                              " " + base + c.string())
                                 .c_str());
    REQUIRE((status >= 0 && WIFEXITED(status) && WEXITSTATUS(status) == 0));
    CHECK(slurp(a) == slurp(c));
}

TEST_CASE("eval emits a json summary on request") {
    TempDir tmp;
    auto in = tmp.path / "p.csv";
    auto cs = tmp.path / "s.csv";
    auto rep = tmp.path / "rep.json";
    REQUIRE(run_cli("synth --n 2000 --seed 3 --out " + in.string()) == 0);
    REQUIRE(run_cli("build --method rs --size 500 --seed 1 --in " + in.string() +
                    " --out " + cs.string() + " 2>/dev/null") == 0);
    REQUIRE(run_cli("--json eval --in " + in.string() + " --coreset " + cs.string() +
                    " --sigma 20 --queries random:1000 --out " + rep.string()) == 0);
    std::string text = slurp(rep);
    CHECK(text.find("\"linf\"") != std::string::npos);
    CHECK(text.find("\"admissible_count\"") != std::string::npos);
    CHECK(text.find("\"per_run_linf\"") != std::string::npos);
}

TEST_CASE("ingest maps household-style files") {
    TempDir tmp;
    auto in = tmp.path / "power.txt";
    auto out = tmp.path / "power.csv";
    std::ofstream(in) << "Date;Time;Global_active_power\n"
                         "16/12/2006;17:24:00;4.216\n"
                         "16/12/2006;17:25:00;?\n"
                         "16/12/2006;17:26:00;3.5\n";
    REQUIRE(run_cli("ingest --in " + in.string() +
                    " --date-time-cols 0,1 --y-col 2 --delim \";\" --missing-token ? "
                    "--out " +
                    out.string() + " 2>/dev/null") == 0);
    auto loaded = kreg::load_points(out);
    REQUIRE(loaded.data.size() == 2);
    CHECK(loaded.data.x(0)[0] == 0.0);
    CHECK(loaded.data.x(1)[0] == 2.0);
    CHECK(loaded.data.y(1) == 3.5);
}

TEST_CASE("bench emits one row per method and size plus the org baseline") {
    TempDir tmp;
    auto in = tmp.path / "p.csv";
    auto out = tmp.path / "bench.csv";
    REQUIRE(run_cli("synth --n 3000 --seed 2 --out " + in.string()) == 0);
    REQUIRE(run_cli("bench --in " + in.string() +
                    " --methods ga,rs --sizes 200,400 --sigma 30 "
                    "--queries random:1000 --reps 2 --seed 4 --out " +
                    out.string()) == 0);
    std::ifstream f(out);
    std::string line;
    std::getline(f, line);
    CHECK(line == "method,size,build_ms,query_ms,linf,linf_norm,failed");
    std::vector<std::string> methods;
    while (std::getline(f, line))
        methods.push_back(line.substr(0, line.find(',')));
    CHECK(methods == std::vector<std::string>{"org", "ga", "ga", "rs", "rs"});
}

TEST_CASE("sweep emits per-repetition rows") {
    TempDir tmp;
    auto in = tmp.path / "p.csv";
    auto out = tmp.path / "sweep.csv";
    REQUIRE(run_cli("synth --n 2000 --seed 2 --out " + in.string()) == 0);
    REQUIRE(run_cli("sweep --in " + in.string() +
                    " --methods ga --sizes 100 --sigmas 20,40 "
                    "--queries random:500 --reps 2 --seed 4 --out " +
                    out.string()) == 0);
    std::ifstream f(out);
    std::string line;
    std::getline(f, line);
    CHECK(line == "method,size,sigma,rep,linf,linf_norm,build_ms,query_ms");
    std::size_t rows = 0;
    while (std::getline(f, line)) {
        CHECK(line.rfind("ga,100,", 0) == 0);
        ++rows;
    }
    CHECK(rows == 4);  // 2 sigmas x 2 reps
}

TEST_CASE("a single-cell sweep agrees with the matching bench row") {
    TempDir tmp;
    auto in = tmp.path / "p.csv";
    auto sw = tmp.path / "sweep.csv";
    auto be = tmp.path / "bench.csv";
    REQUIRE(run_cli("synth --n 2000 --seed 5 --out " + in.string()) == 0);
    std::string common =
        " --sizes 100 --sigma 25 --queries random:800 --reps 1 --seed 12 --out ";
    REQUIRE(run_cli("sweep --in " + in.string() +
                    " --methods ga --sigmas 25 --sizes 100 --queries random:800 "
                    "--reps 1 --seed 12 --out " +
                    sw.string()) == 0);
    REQUIRE(run_cli("bench --in " + in.string() + " --methods ga" + common +
                    be.string()) == 0);
    auto field = [](const fs::path& p, std::size_t row, std::size_t col) {
        std::ifstream f(p);
        std::string line;
        for (std::size_t i = 0; i <= row; ++i) std::getline(f, line);
        std::stringstream ss(line);
        std::string tok;
        for (std::size_t i = 0; i <= col; ++i) std::getline(ss, tok, ',');
        return tok;
    };
    // sweep: method,size,sigma,rep,linf,...   bench: method,size,build,query,linf,...
    CHECK(field(sw, 1, 4) == field(be, 2, 4));
}

TEST_CASE("progressive reports one row per window") {
    TempDir tmp;
    auto in = tmp.path / "p.csv";
    auto out = tmp.path / "prog.csv";
    REQUIRE(run_cli("synth --n 4000 --seed 6 --out " + in.string()) == 0);
    REQUIRE(run_cli("progressive --in " + in.string() +
                    " --gamma1 5 --width1 50 --a 1.5 --sigma 20 "
                    "--windows 500,2000 --queries random:2000 --seed 9 --out " +
                    out.string()) == 0);
    std::ifstream f(out);
    std::string line;
    std::getline(f, line);
    CHECK(line == "window,regions,size,linf,linf_norm");
    std::size_t rows = 0;
    while (std::getline(f, line)) {
        CHECK(line.find("failed") == std::string::npos);
        ++rows;
    }
    CHECK(rows == 2);
}
