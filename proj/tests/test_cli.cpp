#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* cli_path() { return FACTORBALL_CLI_PATH; }

int run_cli(const std::string& args) {
    std::string cmd = std::string(cli_path()) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("factorball_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_config(const fs::path& path, const json& cfg) {
    std::ofstream out(path);
    out << cfg.dump(2);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json cyclic_group_spec() {
    return json{{"cyclic", {{"dimension", 2}, {"length", 1.0}}}};
}

}  // namespace

TEST_CASE("cli distance command matches the quotient oracle") {
    auto dir = temp_dir("distance");
    json cfg{{"schema", "1"},
             {"command", "distance"},
             {"group", cyclic_group_spec()},
             {"points", {{0.0, 0.0}, {std::tanh(0.35), 0.0}}},
             {"budgets", {{"max_word_len", 10}}}};
    write_config(dir / "config.json", cfg);
    int code = run_cli("--config " + (dir / "config.json").string() + " --out " +
                       (dir / "out").string());
    CHECK(code == 0);
    json report = json::parse(slurp(dir / "out" / "report.json"));
    // axis coordinates 0 and 0.7: nearest orbit copy is at distance 0.3
    CHECK(report["distance"].get<double>() == doctest::Approx(0.3).epsilon(1e-9));
    CHECK_FALSE(report["budget_incomplete"].get<bool>());
}

TEST_CASE("cli rejects malformed and unknown-field configs with exit 3") {
    auto dir = temp_dir("bad");
    {
        std::ofstream out(dir / "broken.json");
        out << "{ not json";
    }
    CHECK(run_cli("--config " + (dir / "broken.json").string() + " --out " +
                  (dir / "out").string()) == 3);

    json cfg{{"schema", "1"},
             {"command", "distance"},
             {"group", cyclic_group_spec()},
             {"points", {{0.0, 0.0}, {0.3, 0.0}}},
             {"unexpected_field", 1}};
    write_config(dir / "unknown.json", cfg);
    CHECK(run_cli("--config " + (dir / "unknown.json").string() + " --out " +
                  (dir / "out").string()) == 3);

    json no_schema{{"command", "distance"}};
    write_config(dir / "noschema.json", no_schema);
    CHECK(run_cli("--config " + (dir / "noschema.json").string() + " --out " +
                  (dir / "out").string()) == 3);

    // stochastic command without seeds
    json no_seed{{"schema", "1"},
                 {"command", "measure"},
                 {"region", {{"type", "ball"}, {"center", {0.0, 0.0}},
                             {"radius", 0.3}, {"metric", "euclidean"}}},
                 {"sampler", {{"center", {0.0, 0.0}}, {"radius", 0.4}}}};
    write_config(dir / "noseed.json", no_seed);
    CHECK(run_cli("--config " + (dir / "noseed.json").string() + " --out " +
                  (dir / "out").string()) == 3);
}

TEST_CASE("cli reports are byte-identical across reruns") {
    auto dir = temp_dir("determinism");
    json cfg{{"schema", "1"},
             {"command", "fmo"},
             {"group", cyclic_group_spec()},
             {"q", {{"type", "log_e_over_r"}}},
             {"eps0", 0.4},
             {"levels", 6},
             {"budgets", {{"mc_samples", 30000}, {"max_word_len", 8}}},
             {"seeds", {{"mc", 424242}}}};
    write_config(dir / "config.json", cfg);
    REQUIRE(run_cli("--config " + (dir / "config.json").string() + " --out " +
                    (dir / "a").string()) == 0);
    REQUIRE(run_cli("--config " + (dir / "config.json").string() + " --out " +
                    (dir / "b").string()) == 0);
    CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
    CHECK(slurp(dir / "a" / "fmo.csv") == slurp(dir / "b" / "fmo.csv"));
    CHECK_FALSE(slurp(dir / "a" / "report.json").empty());

    SUBCASE("seed override changes the stream but stays deterministic") {
        REQUIRE(run_cli("--config " + (dir / "config.json").string() + " --out " +
                        (dir / "c").string() + " --seed 7") == 0);
        REQUIRE(run_cli("--config " + (dir / "config.json").string() + " --out " +
                        (dir / "d").string() + " --seed 7") == 0);
        CHECK(slurp(dir / "c" / "report.json") == slurp(dir / "d" / "report.json"));
    }
}

TEST_CASE("cli strict mode turns budget caveats into exit 2") {
    auto dir = temp_dir("strict");
    // Word budget 1 on far-apart points leaves the search frontier hot, so
    // the distance report carries the incomplete flag.
    json cfg{{"schema", "1"},
             {"command", "distance"},
             {"group", cyclic_group_spec()},
             {"points", {{0.0, 0.0}, {std::tanh(1.75), 0.0}}},
             {"budgets", {{"max_word_len", 1}}}};
    write_config(dir / "config.json", cfg);
    CHECK(run_cli("--config " + (dir / "config.json").string() + " --out " +
                  (dir / "lenient").string()) == 0);
    json report = json::parse(slurp(dir / "lenient" / "report.json"));
    REQUIRE(report["budget_incomplete"].get<bool>());
    CHECK(run_cli("--config " + (dir / "config.json").string() + " --out " +
                  (dir / "strict").string() + " --strict") == 2);
}

TEST_CASE("cli measure command reproduces the disk area") {
    auto dir = temp_dir("measure");
    const double rprime = std::tanh(0.5);
    json cfg{{"schema", "1"},
             {"command", "measure"},
             {"region", {{"type", "ball"}, {"center", {0.0, 0.0}},
                         {"radius", 1.0}, {"metric", "hyperbolic"}}},
             {"sampler", {{"center", {0.0, 0.0}}, {"radius", rprime + 1e-9}}},
             {"budgets", {{"mc_samples", 200000}}},
             {"seeds", {{"mc", 99}}}};
    write_config(dir / "config.json", cfg);
    REQUIRE(run_cli("--config " + (dir / "config.json").string() + " --out " +
                    (dir / "out").string()) == 0);
    json report = json::parse(slurp(dir / "out" / "report.json"));
    double expected = 4.0 * M_PI * std::sinh(0.5) * std::sinh(0.5);
    CHECK(std::abs(report["estimate"].get<double>() - expected) / expected < 0.01);
}

TEST_CASE("cli orbit command emits csv") {
    auto dir = temp_dir("orbit");
    json cfg{{"schema", "1"},
             {"command", "orbit"},
             {"group", cyclic_group_spec()},
             {"seed_point", {0.0, 0.0}},
             {"center", {0.0, 0.0}},
             {"radius", 2.2},
             {"budgets", {{"max_word_len", 10}}}};
    write_config(dir / "config.json", cfg);
    REQUIRE(run_cli("--config " + (dir / "config.json").string() + " --out " +
                    (dir / "out").string()) == 0);
    json report = json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["count"].get<int>() == 5);
    std::string csv = slurp(dir / "out" / "orbit.csv");
    // header + 5 rows
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("cli circle family and composed quotient regions") {
    auto dir = temp_dir("extras");

    SUBCASE("circle family modulus is the reciprocal-type value") {
        // Modulus of the separating circle family of the annulus
        // r1 < |x| < r2 is 2 pi / log(r2/r1) inverted: log(r2/r1) / (2 pi).
        json cfg{{"schema", "1"},
                 {"command", "modulus"},
                 {"family", {{"type", "circle_family"}, {"r1", 0.25},
                             {"r2", 0.5}, {"count", 72},
                             {"samples_per_path", 257}}},
                 {"budgets", {{"grid_resolution", 96}}}};
        write_config(dir / "circles.json", cfg);
        REQUIRE(run_cli("--config " + (dir / "circles.json").string() +
                        " --out " + (dir / "out_c").string()) == 0);
        json report = json::parse(slurp(dir / "out_c" / "report.json"));
        double expected = std::log(2.0) / (2.0 * M_PI);
        CHECK(std::abs(report["estimate"].get<double>() - expected) / expected <
              0.05);
    }

    SUBCASE("measure with a composed quotient region") {
        json cfg{{"schema", "1"},
                 {"command", "measure"},
                 {"group", cyclic_group_spec()},
                 {"dirichlet_center", {0.0, 0.0}},
                 {"quotient_region",
                  {{"type", "intersection"},
                   {"of",
                    {{{"type", "ball"}, {"center", {0.0, 0.0}}, {"radius", 0.3}},
                     {{"type", "complement"},
                      {"of", {{"type", "ball"}, {"center", {0.0, 0.0}},
                              {"radius", 0.15}}}}}}}},
                 {"sampler", {{"center", {0.0, 0.0}}, {"radius", 0.25}}},
                 {"budgets", {{"mc_samples", 120000}, {"max_word_len", 8}}},
                 {"seeds", {{"mc", 7}}}};
        write_config(dir / "qregion.json", cfg);
        REQUIRE(run_cli("--config " + (dir / "qregion.json").string() +
                        " --out " + (dir / "out_q").string()) == 0);
        json report = json::parse(slurp(dir / "out_q" / "report.json"));
        // area of the hyperbolic ring = 4 pi (sinh^2(0.15) - sinh^2(0.075))
        double expected = 4.0 * M_PI *
                          (std::sinh(0.15) * std::sinh(0.15) -
                           std::sinh(0.075) * std::sinh(0.075));
        double got = report["estimate"].get<double>();
        CHECK(std::abs(got - expected) / expected < 0.02);
    }
}

TEST_CASE("cli dilatation command evaluates the radial map registry entry") {
    auto dir = temp_dir("dilatation");
    json cfg{{"schema", "1"},
             {"command", "dilatation"},
             {"map", {{"type", "radial_example"}, {"alpha", 2.0}, {"m", 4}}},
             {"points", {{0.5, 0.0}, {0.9, 0.0}}}};
    write_config(dir / "config.json", cfg);
    REQUIRE(run_cli("--config " + (dir / "config.json").string() + " --out " +
                    (dir / "out").string()) == 0);
    json report = json::parse(slurp(dir / "out" / "report.json"));
    // (0.5, 0) sits in the linear branch (K_I = 1); (0.9, 0) in the stretch
    // branch with K_I = 2 log(e/0.9).
    CHECK(report["points"][0]["KI"].get<double>() == doctest::Approx(1.0));
    CHECK(report["points"][1]["KI"].get<double>() ==
          doctest::Approx(2.0 * std::log(M_E / 0.9)).epsilon(1e-6));
    CHECK_FALSE(slurp(dir / "out" / "dilatation.csv").empty());
}

TEST_CASE("cli verify-poletsky passes on the conformal case") {
    auto dir = temp_dir("verify");
    json cfg{{"schema", "1"},
             {"command", "verify-poletsky"},
             {"group", cyclic_group_spec()},
             {"map", {{"type", "identity"}}},
             {"ring", {{"r1", 0.15}, {"r2", 0.35}}},
             {"count", 256},
             {"tol", 0.05},
             {"budgets", {{"mc_samples", 60000}, {"max_word_len", 8},
                          {"grid_resolution", 72}}},
             {"seeds", {{"mc", 2}}}};
    write_config(dir / "config.json", cfg);
    int code = run_cli("--config " + (dir / "config.json").string() + " --out " +
                       (dir / "out").string());
    CHECK(code == 0);
    json report = json::parse(slurp(dir / "out" / "report.json"));
    CHECK(report["pass"].get<bool>());
    CHECK(report["rhs"].get<double>() > 0.0);
}
