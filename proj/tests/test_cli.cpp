#include "polariton/cli/commands.hpp"
#include "polariton/cli/config.hpp"
#include "polariton/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace polariton;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("polariton_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const char* kMinimal = R"({"schema_version": 1, "cavity": {"omega_c_thz": 0.5},
  "phonons": [{"label": "TO1", "omega_thz": 0.96, "nu_thz": 0.5376}]})";

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = cli::parse_config(kMinimal);
    const auto s = cli::system_from_json(cfg.doc);
    CHECK(s.omega_c() == 0.5);
    CHECK(s.temperature_K() == 300.0);
    CHECK_FALSE(cfg.has_section("g2"));
    CHECK_THROWS(cli::parse_config(R"({"schema_version": 2, "cavity": {"omega_c_thz": 1}, "phonons": []})"));
    CHECK_THROWS(cli::parse_config("{not json"));

    const auto slot = cli::parse_config(R"({"schema_version": 1, "cavity": {"slot_length_um": 80, "eps_sub": 4.41},
      "phonons": [{"label": "TO1", "omega_thz": 0.96, "nu_thz": 0.5}]})");
    CHECK(cli::system_from_json(slot.doc).omega_c() == doctest::Approx(cavity_frequency_from_length(80.0, 4.41)));
}

TEST_CASE("grids") {
    using nlohmann::json;
    CHECK(cli::grid_from_json(json(0.3), "x") == std::vector<double>{0.3});
    CHECK(cli::grid_from_json(json::array({0.1, 0.2}), "x").size() == 2);
    const auto lin = cli::grid_from_json(json{{"start", 1.0}, {"stop", 2.0}, {"count", 5}}, "x");
    CHECK(lin[1] == doctest::Approx(1.25));
    const auto lg = cli::grid_from_json(json{{"start", 0.01}, {"stop", 1.0}, {"count", 3}, {"spacing", "log"}}, "x");
    CHECK(lg[1] == doctest::Approx(0.1));
    CHECK(lg.back() == 1.0);
    CHECK_THROWS(cli::grid_from_json(json{{"start", 1.0}, {"stop", 2.0}, {"count", 0}}, "x"));
    CHECK_THROWS(cli::grid_from_json(json{{"start", 1.0}, {"stop", 2.0}, {"count", 3}, {"spacing", "cubic"}}, "x"));
}

TEST_CASE("unknown command") {
    cli::CommandContext ctx;
    CHECK_THROWS(cli::run_command("frobnicate", ctx));
    CHECK(cli::command_names().size() == 8);
}

TEST_CASE("dispersion output is byte-identical across runs") {
    const fs::path cfg = fs::path(POLARITON_DATA_DIR) / "mapbi3_main.json";
    std::ostringstream log;
    for (const std::string cmd : {"dispersion", "g2"}) {
        const auto a = scratch(cmd + "_a");
        const auto b = scratch(cmd + "_b");
        cli::CommandContext ctx{cfg, a, 42, true, &log};
        CHECK(cli::run_command(cmd, ctx) == 0);
        ctx.out_dir = b;
        CHECK(cli::run_command(cmd, ctx) == 0);
        int files = 0;
        for (const auto& entry : fs::directory_iterator(a)) {
            ++files;
            CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
        }
        CHECK(files > 0);
    }
}

TEST_CASE("missing section is an error") {
    const auto dir = scratch("missing");
    const fs::path cfg = dir / "c.json";
    std::ofstream(cfg) << kMinimal;
    std::ostringstream log;
    cli::CommandContext ctx{cfg, dir, 42, true, &log};
    CHECK_THROWS(cli::run_command("fit", ctx));
}
