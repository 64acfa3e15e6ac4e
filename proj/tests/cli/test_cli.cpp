#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWork = fs::temp_directory_path() / "mcfobs_cli_test";

struct Result {
    int code;
    std::string output;
};

Result mcfobs(const std::string& args) {
    fs::create_directories(kWork);
    const fs::path log = kWork / "last.log";
    const std::string cmd = std::string(MCFOBS_BIN) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

fs::path write_config(const std::string& name, const json& j) {
    fs::create_directories(kWork);
    const fs::path p = kWork / (name + ".json");
    std::ofstream(p) << j.dump(2);
    return p;
}

json small_disk(const std::string& name) {
    return {{"preset", "disk"},
            {"name", name},
            {"grid", {{"n", 64}}},
            {"initial", {{"radius", 0.15}}},
            {"flow", {{"h", 1e-3}, {"T", 3e-3}}}};
}

std::size_t count_step_csv(const fs::path& dir) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string f = e.path().filename().string();
        if (f.rfind("step_", 0) == 0 && e.path().extension() == ".csv") ++n;
    }
    return n;
}

json manifest(const fs::path& dir) {
    std::ifstream in(dir / "manifest.json");
    return json::parse(in);
}

}  // namespace

TEST_CASE("run writes one contour per state and a manifest") {
    const fs::path out = kWork / "disk_run";
    fs::remove_all(out);
    const Result r = mcfobs("run " + write_config("disk", small_disk("disk")).string() + " --out " + out.string());
    INFO(r.output);
    REQUIRE(r.code == 0);
    CHECK(count_step_csv(out) == 4);
    CHECK(fs::exists(out / "step_0_t_0.000000.pgm"));
    CHECK(fs::exists(out / "diagnostics.csv"));
    const json m = manifest(out);
    CHECK(m["steps"].size() == 4);
    CHECK(m["variant"] == "unconstrained");
    CHECK(m["files"].size() > 0);
}

TEST_CASE("identical configs give identical artifacts") {
    const fs::path a = kWork / "det_a";
    const fs::path b = kWork / "det_b";
    const fs::path cfg = write_config("det", small_disk("det"));
    REQUIRE(mcfobs("run " + cfg.string() + " --out " + a.string()).code == 0);
    REQUIRE(mcfobs("run " + cfg.string() + " --out " + b.string()).code == 0);
    CHECK(manifest(a)["files"] == manifest(b)["files"]);

    const Result c = mcfobs("compare " + (a / "manifest.json").string() + " " + (b / "manifest.json").string());
    INFO(c.output);
    REQUIRE(c.code == 0);
    std::istringstream lines(c.output);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "step,time,symmetric_difference_area,hausdorff");
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') continue;
        ++rows;
        CHECK(line.find(",0,0") != std::string::npos);
    }
    CHECK(rows == 4);
}

TEST_CASE("constrained run sits inside the unconstrained one") {
    json dumbbell = small_disk("free");
    dumbbell["initial"] = {{"kind", "dumbbell"}, {"c1", {0.38, 0.5}}, {"c2", {0.62, 0.5}}, {"radius", 0.08}, {"neck_width", 0.04}};
    dumbbell["flow"] = {{"h", 4e-4}, {"T", 1.2e-3}};
    const fs::path free_dir = kWork / "incl_free";
    const fs::path held_dir = kWork / "incl_held";
    REQUIRE(mcfobs("run " + write_config("free", dumbbell).string() + " --out " + free_dir.string()).code == 0);
    dumbbell["name"] = "held";
    dumbbell["flow"]["variant"] = "obstacle";
    dumbbell["obstacle"] = {{"kind", "equals_initial"}};
    REQUIRE(mcfobs("run " + write_config("held", dumbbell).string() + " --out " + held_dir.string()).code == 0);
    const std::string a = (held_dir / "manifest.json").string();
    const std::string b = (free_dir / "manifest.json").string();
    CHECK(mcfobs("compare " + a + " " + b + " --assert-inclusion a-in-b").code == 0);
    CHECK(mcfobs("compare " + a + " " + b + " --assert-inclusion b-in-a").code == 1);
}

TEST_CASE("initial set outside the obstacle is rejected") {
    json j = small_disk("bad");
    j["flow"]["variant"] = "obstacle";
    j["obstacle"] = {{"kind", "disk"}, {"center", {0.5, 0.5}}, {"radius", 0.1}};
    const Result r = mcfobs("run " + write_config("bad", j).string() + " --out " + (kWork / "bad").string());
    CHECK(r.code == 3);
    CHECK(r.output.find("initial set not contained in obstacle") != std::string::npos);
}

TEST_CASE("malformed configs are rejected") {
    json j = small_disk("typo");
    j["flow"]["h"] = "tiny";
    CHECK(mcfobs("run " + write_config("typo", j).string()).code == 3);
    CHECK(mcfobs("run " + (kWork / "missing.json").string()).code == 3);
}

TEST_CASE("pinning regime is warned about") {
    json j = small_disk("pinned");
    j["flow"] = {{"h", 1e-4}, {"T", 2e-4}};
    const Result r = mcfobs("run " + write_config("pinned", j).string() + " --out " + (kWork / "pinned").string());
    CHECK(r.code == 0);
    CHECK(r.output.find("warning: pinning regime") != std::string::npos);
    CHECK(manifest(kWork / "pinned")["warnings"].size() == 1);
}

TEST_CASE("unknown verification suite") {
    CHECK(mcfobs("verify nonsense").code == 3);
}

TEST_CASE("quick verification suite passes") {
    const Result r = mcfobs("verify forcing_equivalence --quick");
    INFO(r.output);
    CHECK(r.code == 0);
    CHECK(r.output.find("PASS") != std::string::npos);
}
