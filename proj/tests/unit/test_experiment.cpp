#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mirrorvi/experiment.hpp"

using namespace mirrorvi;
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "mirrorvi_unit" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json mp_config(long iterations) {
    return json{
        {"name", "mp"},
        {"problem", {{"preset", "matching-pennies"}}},
        {"map", {{"type", "entropy-simplex"}}},
        {"framework", "meg"},
        {"policy", "mirror-prox"},
        {"schedule",
         {{"provenance", "meg-constant"}, {"lambda", "auto"}, {"sampler_budget", 300}}},
        {"iterations", iterations},
        {"seed", 7},
        {"certify", json::array({{{"bound", "meg-ergodic-gap"}, {"tol", 1e-9}}})},
    };
}

json sm_config(const std::string& name, const std::string& provenance) {
    return json{
        {"name", name},
        {"problem", {{"preset", "strongly-monotone-mu"}}},
        {"map", {{"type", "euclidean"}}},
        {"framework", "mep"},
        {"policy", "mirror-prox"},
        {"schedule",
         {{"provenance", provenance}, {"lambda", std::sqrt(1.04)}, {"mu", 0.2}}},
        {"iterations", 200},
        {"seed", 3},
        {"u0", json::array({1.0, 1.0})},
        {"checkpoints", json::array({10, 100})},
    };
}

} // namespace

TEST_CASE("config parsing fills defaults") {
    auto cfg = parse_config(mp_config(100), ".");
    CHECK(cfg.name == "mp");
    CHECK(cfg.problem.kind == ProblemSpec::Kind::Bilinear);
    CHECK(cfg.problem.matrix.rows() == 2);
    CHECK(cfg.map.type == "entropy-simplex");
    CHECK(cfg.map.blocks == std::vector<int>{2, 2});
    CHECK(cfg.lambda_auto);
    CHECK(cfg.sampler_budget == 300);
    CHECK(cfg.targets.size() == 1);
    CHECK(cfg.trace_name == "mp_trace.csv");

    auto bp = build_problem(cfg);
    CHECK(bp.map->dim() == 4);
    CHECK(bp.u0.isApprox(Vector::Constant(4, 0.25) * 2.0));  // per-block uniform
}

TEST_CASE("config validation errors carry field paths") {
    json bad = mp_config(100);
    bad.erase("framework");
    CHECK_THROWS_WITH_AS((void)parse_config(bad, "."),
                         doctest::Contains("framework"), ConfigError);

    json bad2 = mp_config(100);
    bad2["schedule"].erase("sampler_budget");
    CHECK_THROWS_WITH_AS((void)parse_config(bad2, "."),
                         doctest::Contains("sampler_budget"), ConfigError);

    json bad3 = mp_config(100);
    bad3["iterations"] = 0;
    CHECK_THROWS_AS((void)parse_config(bad3, "."), ConfigError);

    json bad4 = mp_config(100);
    bad4["policy"] = "unknown";
    CHECK_THROWS_AS((void)parse_config(bad4, "."), ConfigError);
}

TEST_CASE("certify targets must match the schedule provenance") {
    json cfg = mp_config(100);
    cfg["certify"] = json::array({{{"bound", "mep-linear-rate"}, {"tol", 1e-9}}});
    CHECK_THROWS_WITH_AS((void)parse_config(cfg, "."),
                         doctest::Contains("provenance"), ConfigError);
}

TEST_CASE("matrix files are resolved relative to the config") {
    const fs::path dir = fresh_dir("matfile");
    {
        std::ofstream os(dir / "a.json");
        os << "[[1.0, -1.0], [-1.0, 1.0]]";
    }
    json cfg = {
        {"problem", {{"bilinear", {{"matrix_file", "a.json"}}}}},
        {"framework", "meg"},
        {"policy", "mirror-prox"},
        {"schedule", {{"provenance", "meg-constant"}, {"lambda", 2.0}}},
        {"iterations", 5},
    };
    auto parsed = parse_config(cfg, dir);
    CHECK(parsed.problem.matrix(0, 0) == 1.0);
    CHECK(parsed.problem.matrix(0, 1) == -1.0);

    json missing = cfg;
    missing["problem"]["bilinear"]["matrix_file"] = "nope.json";
    CHECK_THROWS_WITH_AS((void)parse_config(missing, dir),
                         doctest::Contains("does not exist"), ConfigError);
}

TEST_CASE("run_experiment produces trace, summary, and passing certificates") {
    const fs::path out = fresh_dir("run_ok");
    auto cfg = parse_config(mp_config(400), ".");
    auto result = run_experiment(cfg, out, /*quiet=*/true);
    REQUIRE(result.status == ExitStatus::Ok);
    REQUIRE(fs::exists(result.trace_path));
    REQUIRE(fs::exists(result.summary_path));
    CHECK(result.lambda_used == doctest::Approx(2.0));  // 2*max|A| certified

    const std::string csv = slurp(result.trace_path);
    CHECK(csv.rfind("k,alpha,beta,res_sq,dist_to_sol,gap,bound\n", 0) == 0);

    const json summary = json::parse(slurp(result.summary_path));
    CHECK(summary["status"] == 0);
    CHECK(summary["lambda"]["source"] == "auto");
    CHECK(summary["lambda"]["certification"]["max_violation"].get<double>() <= 0.0);
    CHECK(summary["certificates"][0]["all_satisfied"] == true);
    CHECK(summary["schedule"]["provenance"] == "meg-constant");
    CHECK(summary["config"]["seed"] == 7);
    CHECK(summary["final"]["gap"].get<double>() < 0.01);
}

TEST_CASE("off-equilibrium game run drives the gap below 0.01 by T=1000") {
    json cfg = mp_config(1000);
    cfg["u0"] = json::array({0.4, 0.6, 0.25, 0.75});
    const fs::path out = fresh_dir("run_gap");
    auto result = run_experiment(parse_config(cfg, "."), out, true);
    REQUIRE(result.status == ExitStatus::Ok);
    const json summary = json::parse(slurp(result.summary_path));
    CHECK(summary["final"]["gap"].get<double>() < 0.01);
    CHECK(summary["final"]["gap"].get<double>() > 0.0);
}

TEST_CASE("re-running a config reproduces outputs byte-identically") {
    const fs::path out1 = fresh_dir("repro1");
    const fs::path out2 = fresh_dir("repro2");
    auto cfg = parse_config(mp_config(200), ".");
    auto r1 = run_experiment(cfg, out1, true);
    auto r2 = run_experiment(cfg, out2, true);
    REQUIRE(r1.status == ExitStatus::Ok);
    REQUIRE(r2.status == ExitStatus::Ok);
    CHECK(slurp(r1.trace_path) == slurp(r2.trace_path));
    CHECK(slurp(r1.summary_path) == slurp(r2.summary_path));
}

TEST_CASE("an unachievable bound yields certification-failure status") {
    json cfg = mp_config(50);
    cfg["schedule"] = {{"provenance", "meg-constant"}, {"lambda", 0.05}};
    cfg["u0"] = json::array({0.4, 0.6, 0.25, 0.75});  // off the equilibrium
    const fs::path out = fresh_dir("run_fail");
    auto result = run_experiment(parse_config(cfg, "."), out, true);
    CHECK(result.status == ExitStatus::CertificationFailed);
    CHECK(result.message.find("violated") != std::string::npos);
    const json summary = json::parse(slurp(out / "mp_summary.json"));
    CHECK(summary["status"] == 1);
    CHECK(summary["certificates"][0]["all_satisfied"] == false);
    CHECK(summary["certificates"][0]["first_violation"].is_number());
}

TEST_CASE("strongly monotone preset converges below 1e-12 with a passing certificate") {
    json cfg = sm_config("sm", "mep-linear");
    cfg["certify"] = json::array({{{"bound", "mep-linear-rate"}, {"tol", 1e-9}}});
    const fs::path out = fresh_dir("run_sm");
    auto result = run_experiment(parse_config(cfg, "."), out, true);
    REQUIRE(result.status == ExitStatus::Ok);
    const json summary = json::parse(slurp(result.summary_path));
    CHECK(summary["final"]["dist_to_sol"].get<double>() < 1e-12);
    CHECK(summary["certificates"][0]["all_satisfied"] == true);
    CHECK(summary["schedule"]["theta0"].is_number());
    CHECK(summary["schedule"]["rate_factor"].is_number());
}

TEST_CASE("min-residual bound with too-large rho is a numeric error") {
    json cfg = {
        {"name", "rho_bad"},
        {"problem", {{"preset", "rotation-a"}}},
        {"framework", "meg"},
        {"policy", "mirror-prox"},
        {"schedule", {{"provenance", "meg-plus"}, {"lambda", std::sqrt(1.01)}}},
        {"iterations", 50},
        {"certify",
         json::array({{{"bound", "meg-min-residual"}, {"tol", 1e-9}, {"rho", 0.3}}})},
    };
    const fs::path out = fresh_dir("run_numeric");
    auto result = run_experiment(parse_config(cfg, "."), out, true);
    CHECK(result.status == ExitStatus::NumericError);
}

TEST_CASE("compare tabulates methods at checkpoints") {
    const fs::path out = fresh_dir("compare");
    auto lin = parse_config(sm_config("meplin", "mep-linear"), ".");
    auto lan = parse_config(sm_config("lan", "mep-lan"), ".");
    auto result = compare_methods({lin, lan}, out, true);
    REQUIRE(result.status == ExitStatus::Ok);
    REQUIRE(fs::exists(result.table_path));

    const std::string csv = slurp(result.table_path);
    CHECK(csv.rfind("method,t,res_sq,dist_to_sol,gap,bound\n", 0) == 0);

    // Parse the table: method -> t -> (dist, bound)
    std::map<std::string, std::map<long, std::pair<double, double>>> table;
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);  // header
    while (std::getline(is, line)) {
        std::istringstream row(line);
        std::string method, t_s, res_s, dist_s, gap_s, bound_s;
        std::getline(row, method, ',');
        std::getline(row, t_s, ',');
        std::getline(row, res_s, ',');
        std::getline(row, dist_s, ',');
        std::getline(row, gap_s, ',');
        std::getline(row, bound_s, ',');
        table[method][std::stol(t_s)] = {std::stod(dist_s), std::stod(bound_s)};
    }
    REQUIRE(table.count("meplin") == 1);
    REQUIRE(table.count("lan") == 1);
    for (long t : {10L, 100L}) {
        // optimized schedule is ahead of the baseline in both senses
        CHECK(table["meplin"][t].first <= table["lan"][t].first);
        CHECK(table["meplin"][t].second < table["lan"][t].second);
    }
}

TEST_CASE("compare validates problem homogeneity and checkpoints") {
    auto lin = parse_config(sm_config("a", "mep-linear"), ".");
    auto other = parse_config(mp_config(200), ".");
    const fs::path out = fresh_dir("compare_bad");
    CHECK(compare_methods({lin, other}, out, true).status ==
          ExitStatus::ConfigError);

    json beyond = sm_config("b", "mep-linear");
    beyond["checkpoints"] = json::array({10, 1000});
    CHECK(compare_methods({parse_config(beyond, ".")}, out, true).status ==
          ExitStatus::ConfigError);

    auto single = parse_config(sm_config("solo", "mep-linear"), ".");
    auto ok = compare_methods({single}, fresh_dir("compare_single"), true);
    REQUIRE(ok.status == ExitStatus::Ok);
    std::istringstream is(slurp(ok.table_path));
    std::string line;
    long rows = 0;
    std::getline(is, line);
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);  // one row per checkpoint {10, 100}
}

TEST_CASE("seed override changes the echoed seed deterministically") {
    const fs::path out = fresh_dir("seed_override");
    auto cfg = parse_config(mp_config(100), ".");
    auto r = run_experiment(cfg, out, true, 1234);
    REQUIRE(r.status == ExitStatus::Ok);
    const json summary = json::parse(slurp(r.summary_path));
    CHECK(summary["lambda"]["certification"]["seed"] == 1234);
}
