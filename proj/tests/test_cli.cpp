#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "blowup/cli.hpp"
#include "blowup/error.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using blowup::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "blowuplab");
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("blowuplab_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("classify") {
    const auto r = invoke({"classify", "--n", "3", "--mu", "2", "--nu", "0", "--kbar", "1", "--p", "1.6"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["verdict"]["verdict"] == "BlowUpTheorem1");
    CHECK(j["verdict"]["alpha"].get<double>() == doctest::Approx(0.75).epsilon(1e-14));

    const auto edge = invoke({"classify", "--n", "3", "--mu", "2", "--kbar", "1", "--p", "2"});
    REQUIRE(edge.code == 0);
    CHECK(nlohmann::json::parse(edge.out)["verdict"]["verdict"] == "Unknown");
}

TEST_CASE("validation errors exit 2 and name the field") {
    const auto missing = invoke({"classify", "--n", "3", "--mu", "2", "--kbar", "1"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("model.p") != std::string::npos);

    const auto bad_p = invoke({"classify", "--n", "3", "--mu", "2", "--kbar", "1", "--p", "0.5"});
    CHECK(bad_p.code == 2);
    CHECK(bad_p.err.find("p") != std::string::npos);

    const auto not_number = invoke({"classify", "--n", "3.5", "--mu", "2", "--kbar", "1", "--p", "1.5"});
    CHECK(not_number.code == 2);
    CHECK(not_number.err.find("model.n") != std::string::npos);

    const auto bad_flag = invoke({"classify", "--bogus", "1"});
    CHECK(bad_flag.code == 2);

    CHECK(invoke({}).code == 2);
    CHECK(invoke({"nonsense"}).code == 2);

    const auto bad_cfl = invoke({"simulate", "--n", "3", "--mu", "2", "--kbar", "1", "--p", "1.5", "--cfl", "2",
                                 "--out", scratch_dir("cfl").string()});
    CHECK(bad_cfl.code == 2);
    CHECK(bad_cfl.err.find("cfl") != std::string::npos);
}

TEST_CASE("bound") {
    const auto r = invoke({"bound", "--n", "3", "--mu", "0", "--kbar", "0.5", "--p", "1.8", "--eps", "0.5"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["conditional"] == true);
    CHECK(j["exponent"].get<double>() == doctest::Approx(0.5).epsilon(1e-14));
    const double T = j["T_upper"].get<double>();
    const double C = j["C"].get<double>();
    CHECK(T == doctest::Approx(C * std::pow(0.5, -0.5)).epsilon(1e-12));

    const auto bad = invoke({"bound", "--n", "3", "--mu", "2", "--kbar", "0.5", "--p", "2.5"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("kbar<2/(p-1)-mu/2") != std::string::npos);
    CHECK(invoke({"bound", "--n", "3", "--mu", "0", "--kbar", "0.5", "--p", "1.8", "--delta-m", "0"}).code == 2);
}

TEST_CASE("help lists every key with units and defaults") {
    const auto r = invoke({"sweep", "--help"});
    CHECK(r.code == 0);
    for (const auto& key : {"model.p", "grid.dr", "bound.delta_m", "sweep.eps_count", "run.jobs"}) {
        CHECK(r.out.find(std::string("key ") + key) != std::string::npos);
    }
    CHECK(r.out.find("units length, default 0.05") != std::string::npos);

    std::string all;
    for (const auto& sub : {"classify", "bound", "simulate", "sweep", "atlas", "converge"}) all += invoke({sub, "--help"}).out;
    for (const auto& k : blowup::cli::key_registry()) CHECK(all.find("key " + k.key + ",") != std::string::npos);
}

TEST_CASE("config files") {
    const auto cfg = blowup::cli::parse_config_text("# comment\nmodel.n = 3\n\nmodel.p=1.6  # trailing\n");
    CHECK(cfg.at("model.n") == "3");
    CHECK(cfg.at("model.p") == "1.6");
    CHECK_THROWS_AS(blowup::cli::parse_config_text("model.q = 1\n"), blowup::ConfigError);
    CHECK_THROWS_AS(blowup::cli::parse_config_text("model.n 3\n"), blowup::ConfigError);

    const auto dir = scratch_dir("config");
    fs::create_directories(dir);
    const auto file = dir / "run.cfg";
    std::ofstream(file) << "model.n = 3\nmodel.mu = 2\nmodel.kbar = 1\nmodel.p = 2.5\n";
    // Flags win over the file.
    const auto r = invoke({"classify", "--config", file.string(), "--p", "1.6"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["verdict"]["verdict"] == "BlowUpTheorem1");

    std::ofstream(dir / "bad.cfg") << "model.n = 3\nmodel.colour = red\n";
    const auto bad = invoke({"classify", "--config", (dir / "bad.cfg").string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("model.colour") != std::string::npos);

    CHECK(invoke({"classify", "--config", (dir / "missing.cfg").string()}).code == 3);
}

TEST_CASE("atlas writes annotated artifacts") {
    const auto dir = scratch_dir("atlas");
    const auto r = invoke({"atlas", "--n", "3", "--mu", "2", "--nu", "0", "--out", dir.string(), "--kbar-count", "20",
                           "--p-count", "15"});
    REQUIRE(r.code == 0);
    const std::string svg = slurp(dir / "atlas.svg");
    char k0[64];
    char ps[64];
    std::snprintf(k0, sizeof k0, "%.10f", static_cast<double>((-1 + oracle::kSqrt17) / 2));
    std::snprintf(ps, sizeof ps, "%.10f", static_cast<double>((3 + oracle::kSqrt17) / 4));
    CHECK(svg.find(k0) != std::string::npos);
    CHECK(svg.find(ps) != std::string::npos);
    CHECK(count_lines(slurp(dir / "atlas.csv")) == 1u + 20u * 15u);
    CHECK(fs::exists(dir / "atlas_curves.csv"));

    // Byte-identical on repeat.
    const auto dir2 = scratch_dir("atlas2");
    invoke({"atlas", "--n", "3", "--mu", "2", "--nu", "0", "--out", dir2.string(), "--kbar-count", "20", "--p-count",
            "15"});
    CHECK(slurp(dir / "atlas.csv") == slurp(dir2 / "atlas.csv"));
    CHECK(slurp(dir / "atlas.svg") == slurp(dir2 / "atlas.svg"));
}

TEST_CASE("sweep writes one row per eps") {
    const auto dir = scratch_dir("sweep");
    const std::vector<std::string> args{"sweep",   "--n",     "3",     "--mu",   "0",           "--kbar",
                                        "0.5",     "--p",     "1.8",   "--dr",   "0.1",         "--t-max",
                                        "20",      "--check-bound", "--jobs", "1", "--out", dir.string()};
    const auto r = invoke(args);
    REQUIRE(r.code == 0);
    CHECK(count_lines(slurp(dir / "sweep.csv")) == 6u);
    CHECK(count_lines(slurp(dir / "bound_check.csv")) == 6u);
    const auto j = nlohmann::json::parse(slurp(dir / "sweep.json"));
    CHECK(j["complete"] == true);
    CHECK(j["bound_check"]["conditional"] == true);
    CHECK(j["bound_check"]["all_pass"] == true);

    const std::string first = slurp(dir / "sweep.csv");
    fs::remove_all(dir);
    REQUIRE(invoke(args).code == 0);
    CHECK(slurp(dir / "sweep.csv") == first);

    const auto list = invoke({"sweep", "--n", "3", "--mu", "0", "--kbar", "0.5", "--p", "1.8", "--eps-list", "2,3",
                              "--out", scratch_dir("sweep_short").string()});
    CHECK(list.code == 2);
    CHECK(list.err.find("eps") != std::string::npos);
}

TEST_CASE("simulate in both forms with a transform check") {
    const auto dir = scratch_dir("simulate");
    for (const std::string form : {"v", "u"}) {
        const auto r = invoke({"simulate", "--n", "3", "--mu", "2", "--kbar", "0.5", "--p", "1.8", "--dr", "0.1",
                               "--t-max", "3", "--r-obs", "5", "--snapshot-every", "5", "--form", form,
                               "--check-transform", "--out", dir.string()});
        REQUIRE(r.code == 0);
        const auto j = nlohmann::json::parse(r.out);
        CHECK(j["form"] == form);
        CHECK(j["transform"]["max_rel_discrepancy"].get<double>() < 0.05);
        CHECK(fs::exists(dir / "snapshots.csv"));
        CHECK(fs::exists(dir / "run.json"));
    }
}

TEST_CASE("converge on the free wave") {
    const auto dir = scratch_dir("converge");
    const auto r = invoke({"converge", "--free-wave", "--dr", "0.1", "--t-max", "2", "--r-obs", "5", "--out",
                           dir.string()});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "converge.json"));
    CHECK(j["pass"] == true);
    CHECK(j["exact_reference"] == true);
}

TEST_CASE("io failure exits 3") {
    const auto dir = scratch_dir("io");
    fs::create_directories(dir);
    const auto blocker = dir / "file";
    std::ofstream(blocker) << "x";
    const auto r = invoke({"atlas", "--n", "3", "--mu", "2", "--kbar-count", "3", "--p-count", "3", "--out",
                           (blocker / "sub").string()});
    CHECK(r.code == 3);
}

TEST_CASE("jobs fall back to the environment") {
    const auto dir = scratch_dir("jobs");
    setenv("BLOWUPLAB_JOBS", "-3", 1);
    const auto bad = invoke({"sweep", "--n", "3", "--mu", "0", "--kbar", "0.5", "--p", "1.8", "--out", dir.string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("run.jobs") != std::string::npos);
    unsetenv("BLOWUPLAB_JOBS");
}
