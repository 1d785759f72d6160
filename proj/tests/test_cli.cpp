#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string cli = CIBOUND_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("cibound_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
};

int run(const std::string& args) {
    const int rc = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

int run_env(const std::string& env, const std::string& args) {
    const int rc = std::system((env + " " + cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// tiny budgets keep the CLI tests fast; quality is covered elsewhere
const std::string kTinyBound =
    "--starts 2 --max-iterations 60 --restarts 0 --panels 8 --nodes-per-panel 4 "
    "--m1 1 --m2 1 --seed 5";

}  // namespace

TEST_CASE("risk-curve writes deterministic CSV and JSON", "[cli]") {
    TempDir tmp;
    const std::string out = (tmp.path / "rc").string();
    REQUIRE(run("risk-curve --rho 0 --width constant --gamma-max 3 --gamma-step 0.5 --out " +
                out) == 0);
    const std::string csv = slurp(out + ".csv");
    CHECK(csv.rfind("# manifest {", 0) == 0);
    CHECK(csv.find("gamma,coverage,sel\n") != std::string::npos);
    // every row of the trivial configuration is coverage 0.95, sel 1
    std::istringstream rows(csv.substr(csv.find("gamma,")));
    std::string line;
    std::getline(rows, line);
    int nrows = 0;
    while (std::getline(rows, line)) {
        CHECK(line.substr(line.find(',') + 1) == "0.95,1");
        ++nrows;
    }
    CHECK(nrows == 7);

    const json j = json::parse(slurp(out + ".json"));
    CHECK(j.at("manifest").at("command") == "risk-curve");
    CHECK(j.at("coverage").size() == 7);

    // byte-identical on repetition
    const std::string csv1 = slurp(out + ".csv"), json1 = slurp(out + ".json");
    REQUIRE(run("risk-curve --rho 0 --width constant --gamma-max 3 --gamma-step 0.5 --out " +
                out) == 0);
    CHECK(slurp(out + ".csv") == csv1);
    CHECK(slurp(out + ".json") == json1);
}

TEST_CASE("risk-curve sd-delta emits a summary", "[cli]") {
    TempDir tmp;
    const std::string out = (tmp.path / "sd").string();
    REQUIRE(run("risk-curve --rho 0.7 --width sd-delta --gamma-max 8 --gamma-step 0.25 --out " +
                out) == 0);
    const json j = json::parse(slurp(out + ".json"));
    CHECK(j.at("summary").at("maxSel").get<double>() > 1.0);
    CHECK(j.at("summary").at("minCoverage").get<double>() < 0.95);
    CHECK(j.at("summary").at("selAtGammaZero").get<double>() < 1.0);
}

TEST_CASE("risk-curve reads a width file", "[cli]") {
    TempDir tmp;
    const fs::path wf = tmp.path / "width.json";
    {
        std::ofstream out(wf);
        out << json{{"nodes", {1.0, 5.0}}, {"values", {1.96, 1.96}}, {"tail", 1.96},
                    {"c", 10.0}}
                   .dump();
    }
    const std::string out = (tmp.path / "wf").string();
    CHECK(run("risk-curve --rho 0 --width file --width-file " + wf.string() +
              " --gamma-max 1 --gamma-step 0.5 --out " + out) == 0);
    CHECK(run("risk-curve --width file --gamma-max 1 --gamma-step 0.5 --out " + out) == 2);
    CHECK(run("risk-curve --width file --width-file /nonexistent.json --out " + out) == 1);
}

TEST_CASE("bound writes result files and caches by config hash", "[cli]") {
    TempDir tmp;
    const std::string out = (tmp.path / "bd").string();
    const std::string cache = (tmp.path / "cache").string();
    const std::string cmd = "bound --alpha-tilde 0.05 --rho 0.7 --u 0.11 " + kTinyBound +
                            " --out " + out + " --cache-dir " + cache;
    REQUIRE(run(cmd) == 0);
    const std::string csv1 = slurp(out + ".csv");
    const std::string json1 = slurp(out + ".json");
    CHECK(csv1.find("alphaTilde,rho,u,gainUpperBound,loss,ratio") != std::string::npos);

    const json j = json::parse(slurp(out + ".json"));
    CHECK(j.at("lb").is_number());
    CHECK(j.at("manifest").at("configHash").is_string());
    CHECK(j.at("prior").at("gamma1").size() == 1);

    // exactly one cache record, named by the config hash
    int records = 0;
    for (const auto& e : fs::directory_iterator(cache)) {
        CHECK(e.path().extension() == ".json");
        ++records;
    }
    CHECK(records == 1);

    // cache hit reproduces outputs byte-identically
    fs::remove(out + ".csv");
    fs::remove(out + ".json");
    REQUIRE(run(cmd) == 0);
    CHECK(slurp(out + ".csv") == csv1);
    CHECK(slurp(out + ".json") == json1);

    // the cache-dir environment variable is honoured; the data rows match
    // the first run (only the embedded output paths differ)
    const std::string out2 = (tmp.path / "bd2").string();
    const std::string cache2 = (tmp.path / "cache2").string();
    REQUIRE(run_env("CIBOUND_CACHE_DIR=" + cache2,
                    "bound --alpha-tilde 0.05 --rho 0.7 --u 0.11 " + kTinyBound + " --out " +
                        out2) == 0);
    CHECK(fs::exists(cache2));
    const std::string csv2 = slurp(out2 + ".csv");
    CHECK(csv2.substr(csv2.find("alphaTilde")) == csv1.substr(csv1.find("alphaTilde")));
}

TEST_CASE("bound --u-star-star uses the threshold CSV layout", "[cli]") {
    TempDir tmp;
    const std::string out = (tmp.path / "uss").string();
    REQUIRE(run("bound --alpha-tilde 0.05 --rho 0.7 --u-star-star --initial-u 0.1 " +
                kTinyBound + " --out " + out) == 0);
    const std::string csv = slurp(out + ".csv");
    CHECK(csv.find("alphaTilde,rho,m1,m2,uStarStar") != std::string::npos);
    const json j = json::parse(slurp(out + ".json"));
    CHECK(j.at("uStarStar").is_number());
}

TEST_CASE("bound rejects infeasible flags", "[cli]") {
    CHECK(run("bound --rho 1.0 --u 0.1") == 2);
    CHECK(run("bound --rho 0.5 --alpha-tilde 1.5 --u 0.1") == 2);
    CHECK(run("bound --rho 0.5 --u -0.2") == 2);
    CHECK(run("totally-unknown-command") == 2);
}

TEST_CASE("verify gates on 3 standard errors", "[cli]") {
    TempDir tmp;
    // trimmed case list keeps the runtime small
    const fs::path cases = tmp.path / "cases.json";
    {
        std::ofstream out(cases);
        out << R"([{"kind":"coverage","width":"sd-delta","gamma":1.0,"rho":0.8},
                   {"kind":"sel","width":"sd-delta","gamma":0.0,"rho":0.8}])";
    }
    CHECK(run("verify --n 100000 --cases " + cases.string()) == 0);
    CHECK(run("verify --n 100000 --cases " + cases.string() + " --corrupt-bias") == 1);

    const fs::path empty = tmp.path / "empty.json";
    std::ofstream(empty) << "[]";
    CHECK(run("verify --cases " + empty.string()) == 2);

    const fs::path bad = tmp.path / "bad.json";
    std::ofstream(bad) << "{nonsense";
    CHECK(run("verify --cases " + bad.string()) == 2);

    CHECK(run("verify --n 10") == 2);  // below the minimum sample size
}
