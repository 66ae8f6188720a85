#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "fikit/io.hpp"
#include "fikit/report.hpp"

namespace fs = std::filesystem;

namespace {

const std::string cli = FIKIT_CLI_PATH;

int run(const std::string& args) {
    std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::path("cli_scratch") / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("space gen writes a loadable space and a run lock") {
    auto dir = fresh_dir("gen");
    auto out = dir / "grid.space.json";
    CHECK(run("space gen --kind grid1d --a -1 --b 1 --n 41 -o " + out.string()) == 0);
    REQUIRE(fs::exists(out));
    auto s = fikit::load_space(out.string());
    CHECK(s.size() == 41);
    CHECK(s.dist(0, 40) == doctest::Approx(2.0));
    CHECK(fs::exists(dir / "run.lock.json"));
    auto lock = nlohmann::json::parse(slurp(dir / "run.lock.json"));
    CHECK(lock.contains("seed"));
    CHECK(lock.contains("threads"));
    CHECK(lock["tool"] == "fikit");
}

TEST_CASE("space gen heisenberg") {
    auto dir = fresh_dir("gen_heis");
    auto out = dir / "heis.space.json";
    CHECK(run("space gen --kind heisenberg --levels 2 --step 0.5 -o " + out.string()) == 0);
    auto s = fikit::load_space(out.string());
    CHECK(s.approximate);
    CHECK(s.size() > 5);
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("definitely-not-a-subcommand") == 2);
    CHECK(run("space gen --kind grid1d --n 5") == 2);            // missing -o
    CHECK(run("space gen --kind nosuch --n 5 -o /tmp/x.json") == 2);
    auto dir = fresh_dir("usage");
    auto space = dir / "s.json";
    REQUIRE(run("space gen --kind grid1d --a 0 --b 1 --n 21 -o " + space.string()) == 0);
    CHECK(run("hopflax --space " + space.string() + " --g coord --t 0 -o " + (dir / "u.csv").string()) == 2);
}

TEST_CASE("hopflax writes the flow and honors --check") {
    auto dir = fresh_dir("hopflax");
    auto space = dir / "s.json";
    REQUIRE(run("space gen --kind grid1d --a -2 --b 2 --n 201 -o " + space.string()) == 0);
    auto u = dir / "u.csv";
    CHECK(run("hopflax --space " + space.string() + " --g abs --t 1 --q 2 -o " + u.string()) == 0);
    REQUIRE(fs::exists(u));
    std::ifstream in(u);
    std::string header;
    std::getline(in, header);
    CHECK(header.find("u") != std::string::npos);
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 201);

    CHECK(run("hopflax --space " + space.string() + " --g abs --t 1 --q 2 --check semigroup --s 0.5 -o " +
              (dir / "u2.csv").string()) == 0);
    CHECK(fs::exists(dir / "semigroup.report.json"));
}

TEST_CASE("check lsi produces reports and deterministic bytes") {
    auto dir1 = fresh_dir("lsi1");
    auto dir2 = fresh_dir("lsi2");
    std::string base = "check lsi --space grid1d:-4,4,201 --measure gaussian:1 --family exp "
                       "--q 2 --estimate-K --seed 99 --out-dir ";
    CHECK(run(base + dir1.string()) == 0);
    CHECK(run(base + dir2.string()) == 0);
    REQUIRE(fs::exists(dir1 / "lsi.report.json"));
    REQUIRE(fs::exists(dir1 / "lsi.report.md"));
    CHECK(slurp(dir1 / "lsi.report.json") == slurp(dir2 / "lsi.report.json"));
    auto r = fikit::load_report_json((dir1 / "lsi.report.json").string());
    CHECK(r.pass);
    CHECK(r.name == "lsi");
}

TEST_CASE("failing checks exit with code 1") {
    auto dir = fresh_dir("lsi_fail");
    // K far above the true constant cannot hold
    CHECK(run("check lsi --space grid1d:-4,4,201 --measure gaussian:1 --family exp --q 2 "
              "--K 50 --out-dir " + dir.string()) == 1);
    auto r = fikit::load_report_json((dir / "lsi.report.json").string());
    CHECK_FALSE(r.pass);
}

TEST_CASE("check talagrand against a perturbed measure") {
    auto dir = fresh_dir("tal");
    CHECK(run("check talagrand --space grid1d:-4,4,201 --measure gaussian:1 --nu perturb:0.5 "
              "--p 2 --K 0.9 --out-dir " + dir.string()) == 0);
    CHECK(fs::exists(dir / "talagrand.report.json"));
}

TEST_CASE("check hc writes the sampled curve") {
    auto dir = fresh_dir("hc");
    CHECK(run("check hc --space grid1d:-4,4,201 --measure gaussian:1 --f random:0.3 --q 2 "
              "--K 0.9 --t-grid 0.1:1:10 --out-dir " + dir.string()) == 0);
    CHECK(fs::exists(dir / "hc.report.json"));
    REQUIRE(fs::exists(dir / "hc_curve.csv"));
    std::ifstream in(dir / "hc_curve.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,F");
}

TEST_CASE("config file fills flags but explicit flags win") {
    auto dir = fresh_dir("config");
    auto cfg = dir / "cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({"q": 2, "K": 50, "space": "grid1d:-4,4,201", "measure": "gaussian:1",)"
            << R"( "family": "exp", "out-dir": ")" << dir.string() << R"("})";
    }
    // config alone: K = 50 fails
    CHECK(run("check lsi --config " + cfg.string()) == 1);
    // explicit flag overrides the config value
    CHECK(run("check lsi --config " + cfg.string() + " --K 0.9") == 0);
    auto lock = nlohmann::json::parse(slurp(dir / "run.lock.json"));
    CHECK(lock["config"]["K"] == "0.9");
}

TEST_CASE("report aggregates a directory and propagates the worst status") {
    auto dir = fresh_dir("agg");
    CHECK(run("check lsi --space grid1d:-4,4,201 --measure gaussian:1 --family exp --q 2 "
              "--K 0.9 --out-dir " + dir.string()) == 0);
    auto summary = dir / "summary.md";
    CHECK(run("report --dir " + dir.string() + " -o " + summary.string()) == 0);
    REQUIRE(fs::exists(summary));
    CHECK(slurp(summary).find("lsi") != std::string::npos);

    // add a failing report: aggregate exit becomes 1
    CHECK(run("check lsi --space grid1d:-4,4,201 --measure gaussian:1 --family exp --q 2 "
              "--K 50 --out-dir " + dir.string()) == 1);
    // the second run overwrote lsi.report.json; copy it under another name
    fs::copy_file(dir / "lsi.report.json", dir / "lsi_fail.report.json",
                  fs::copy_options::overwrite_existing);
    CHECK(run("check lsi --space grid1d:-4,4,201 --measure gaussian:1 --family exp --q 2 "
              "--K 0.9 --out-dir " + dir.string()) == 0);
    CHECK(run("report --dir " + dir.string() + " -o " + summary.string()) == 1);
}

TEST_CASE("report treats inconclusive as worse than pass but not failure") {
    auto dir = fresh_dir("agg_inc");
    fikit::CheckReport ok;
    ok.name = "alpha";
    ok.lhs = 0.0;
    ok.rhs = 1.0;
    ok.tolerance = 0.0;
    ok.settle();
    fikit::save_report_json(ok, (dir / "alpha.report.json").string());
    fikit::CheckReport inc;
    inc.name = "beta";
    inc.lhs = 1.0;
    inc.rhs = 0.0;
    inc.tolerance = 0.0;
    inc.settle();
    inc.status = fikit::CheckStatus::Inconclusive;
    inc.note = "hypothesis unverified";
    fikit::save_report_json(inc, (dir / "beta.report.json").string());
    CHECK(run("report --dir " + dir.string() + " -o " + (dir / "s.md").string()) == 3);
}

TEST_CASE("report on an empty directory is a usage error") {
    auto dir = fresh_dir("agg_empty");
    CHECK(run("report --dir " + dir.string() + " -o " + (dir / "s.md").string()) == 2);
}
