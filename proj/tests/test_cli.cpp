#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "smab/presets.hpp"
#include "smab/runner.hpp"
#include "smab/topology.hpp"

using namespace smab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("smab-test-" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

KvFile kv_of(const std::string& text, const std::string& name = "inline") {
    std::istringstream in(text);
    return parse_kv(in, name);
}

const std::string kMinimal =
    "sim.arms = 3\n"
    "sim.horizon = 200\n"
    "sim.tau = 2\n"
    "graph.p = 0.9\n"
    "means = 0.8 0.7 0.6\n";

}  // namespace

TEST_CASE("parser diagnostics carry file and line") {
    CHECK_THROWS_WITH_AS(kv_of("sim.arms\n", "c.txt"), doctest::Contains("c.txt:1"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(kv_of("a = 1\na = 2\n", "c.txt"), doctest::Contains("c.txt:2"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(resolve_run_spec(kv_of(kMinimal + "bogus.key = 3\n", "c.txt")),
                         doctest::Contains("c.txt:6"), std::runtime_error);
    CHECK_THROWS_WITH_AS(resolve_run_spec(kv_of("sim.arms = banana\n", "c.txt")),
                         doctest::Contains("integer"), std::runtime_error);
    CHECK_THROWS_WITH_AS(resolve_run_spec(kv_of(kMinimal + "sim.master_seed = -1\n", "c.txt")),
                         doctest::Contains("unsigned"), std::runtime_error);
}

TEST_CASE("comments and blank lines are ignored") {
    const KvFile kv = kv_of("# header\n\n  sim.arms = 3 \n# trailing\n");
    REQUIRE(kv.entries.size() == 1);
    CHECK(kv.entries[0].key == "sim.arms");
    CHECK(kv.entries[0].value == "3");
    CHECK(kv.entries[0].line == 3);
}

TEST_CASE("defaults are expanded on resolve") {
    const RunSpec spec = resolve_run_spec(kv_of(kMinimal));
    CHECK(spec.base.arm_count == 3);
    CHECK(spec.base.horizon == 200);
    CHECK(spec.base.master_seed == 1);
    CHECK(spec.base.record_stride == 100);
    CHECK(spec.base.player.algorithm == PlayerAlgorithm::Exp3P);
    CHECK(spec.base.player.rho == doctest::Approx(1.0 / (200.0 * 200.0)).epsilon(1e-15));
    CHECK(spec.base.player.delta > 0.0);
    CHECK(spec.replicas == 1);
    CHECK(spec.base.strategy_of(0) == ArmStrategy::Equilibrium);
    CHECK(spec.base.message_mode_of(2) == MessageMode::Honest);
}

TEST_CASE("per-arm strategy and deviation keys resolve") {
    const RunSpec spec = resolve_run_spec(kv_of(kMinimal +
                                                "arm.1.strategy = overbid\n"
                                                "arm.2.message = inflate\n"
                                                "deviation.arm = 0\n"
                                                "deviation.modes = truthful zero-message\n"
                                                "run.replicas = 4\n"));
    CHECK(spec.base.strategies[1] == ArmStrategy::Overbid);
    CHECK(spec.base.message_modes[2] == MessageMode::Inflate);
    REQUIRE(spec.deviation_arm.has_value());
    CHECK(*spec.deviation_arm == 0);
    REQUIRE(spec.deviation_modes.size() == 2);
    CHECK(spec.deviation_modes[0] == DeviationMode::AlwaysTruthful);
    CHECK(spec.deviation_modes[1] == DeviationMode::ZeroMessage);
    CHECK(spec.replicas == 4);

    CHECK_THROWS(resolve_run_spec(kv_of(kMinimal + "deviation.arm = 0\n")));
    CHECK_THROWS(resolve_run_spec(kv_of(kMinimal + "deviation.modes = truthful\n")));
    CHECK_THROWS(resolve_run_spec(kv_of(kMinimal + "arm.0.strategy = sneaky\n")));
}

TEST_CASE("serialization round-trips to a fixed point") {
    const RunSpec spec = resolve_run_spec(kv_of(kMinimal +
                                                "sweep.tau = 1 5 10\n"
                                                "run.replicas = 3\n"
                                                "arm.0.strategy = truthful\n"));
    const std::string first = serialize_run_spec(spec);
    const RunSpec reparsed = resolve_run_spec(kv_of(first, "roundtrip"));
    const std::string second = serialize_run_spec(reparsed);
    CHECK(first == second);
}

TEST_CASE("explicit adjacency survives the round trip") {
    RunSpec spec = resolve_run_spec(kv_of(kMinimal));
    Graph g(3);
    g.set_edge(0, 1, true);
    g.set_edge(1, 2, true);
    g.set_edge(0, 2, true);
    spec.base.topology = g;
    const std::string text = serialize_run_spec(spec);
    CHECK(text.find("graph.adjacency = 0 1 1 1 0 1 1 1 0") != std::string::npos);
    const RunSpec back = resolve_run_spec(kv_of(text));
    REQUIRE(back.base.topology.has_value());
    CHECK(*back.base.topology == g);
}

TEST_CASE("meta keys from manifests are ignored") {
    const RunSpec spec =
        resolve_run_spec(kv_of(kMinimal + "meta.version = something\nmeta.wall_seconds = 1\n"));
    CHECK(spec.base.arm_count == 3);
}

TEST_CASE("preset catalog") {
    auto table1 = preset_spec("table1");
    REQUIRE(table1.has_value());
    CHECK(table1->base.arm_count == 10);
    CHECK(table1->base.horizon == 500000);
    CHECK(table1->base.tau == 50);
    CHECK(table1->base.edge_probability == 0.6);
    CHECK(table1->base.player.delta == 2778.0);
    CHECK(table1->base.offer_scale() == doctest::Approx(0.2357).epsilon(1e-3));

    auto nash = preset_spec("nash-audit");
    REQUIRE(nash.has_value());
    CHECK(nash->base.arm_count == 5);
    CHECK(nash->base.horizon == 20000);
    REQUIRE(nash->deviation_arm.has_value());
    CHECK(nash->deviation_modes.size() == 5);
    for (int k = 0; k < 5; ++k)
        CHECK(nash->base.strategy_of(k) == ArmStrategy::Equilibrium);

    auto stress = preset_spec("stress-B");
    REQUIRE(stress.has_value());
    REQUIRE(stress->base.defection_slack_override.has_value());
    CHECK(*stress->base.defection_slack_override ==
          static_cast<double>(stress->base.horizon) / (4.0 * stress->base.arm_count));

    CHECK(preset_spec("smoke").has_value());
    CHECK(preset_spec("fig2").has_value());
    CHECK(preset_spec("tau-sweep").has_value());
    CHECK(preset_spec("truthful-baseline").has_value());
    CHECK_FALSE(preset_spec("nope").has_value());
}

TEST_CASE("smoke preset: full run, artifacts, determinism, manifest round-trip") {
    const RunSpec spec = *preset_spec("smoke");
    RunOptions options;
    options.quiet = true;
    options.plot = true;
    options.dump_topology = true;

    const fs::path dir1 = fresh_dir("smoke1");
    const fs::path dir2 = fresh_dir("smoke2");
    CHECK(run_spec(spec, dir1, options) == 0);
    CHECK(run_spec(spec, dir2, options) == 0);

    for (const char* name : {"summary.csv", "rounds.csv", "decay.csv", "audit.txt",
                             "manifest.txt", "fig2.svg", "decay.svg", "topology.txt"})
        CHECK(fs::exists(dir1 / name));

    // byte-identical on re-run
    CHECK(slurp(dir1 / "summary.csv") == slurp(dir2 / "summary.csv"));
    CHECK(slurp(dir1 / "rounds.csv") == slurp(dir2 / "rounds.csv"));

    // the manifest reproduces the run
    const KvFile manifest = parse_kv_file((dir1 / "manifest.txt").string());
    const RunSpec from_manifest = resolve_run_spec(manifest);
    const fs::path dir3 = fresh_dir("smoke3");
    RunOptions plain;
    plain.quiet = true;
    CHECK(run_spec(from_manifest, dir3, plain) == 0);
    CHECK(slurp(dir1 / "summary.csv") == slurp(dir3 / "summary.csv"));

    // topology dump parses back
    std::ifstream topo(dir1 / "topology.txt");
    const Graph g = read_graph(topo);
    CHECK(g.node_count() == spec.base.arm_count);

    // plots are SVG documents
    CHECK(slurp(dir1 / "fig2.svg").rfind("<svg", 0) == 0);
    CHECK(slurp(dir1 / "decay.svg").rfind("<svg", 0) == 0);
}

TEST_CASE("seed and stride options override the config") {
    RunSpec spec = *preset_spec("smoke");
    RunOptions options;
    options.quiet = true;
    options.seed = 99;
    options.stride = 50;
    const fs::path dir = fresh_dir("overrides");
    CHECK(run_spec(spec, dir, options) == 0);
    const std::string manifest = slurp(dir / "manifest.txt");
    CHECK(manifest.find("sim.master_seed = 99") != std::string::npos);
    CHECK(manifest.find("sim.record_stride = 50") != std::string::npos);

    // 1000 rounds / stride 50 = 20 sampled rows (plus header)
    const std::string rounds = slurp(dir / "rounds.csv");
    CHECK(std::count(rounds.begin(), rounds.end(), '\n') == 21);
}

TEST_CASE("strict mode fails runs that blow the revenue cap") {
    RunSpec spec;
    std::istringstream cfg(
        "sim.arms = 3\nsim.horizon = 2000\nsim.tau = 2\ngraph.p = 0.9\n"
        "means = 0.8 0.7 0.6\narm.*.strategy = truthful\nsim.master_seed = 5\n");
    spec = resolve_run_spec(parse_kv(cfg, "strict-test"));
    RunOptions options;
    options.quiet = true;
    options.strict = true;
    const fs::path dir = fresh_dir("strict");
    CHECK(run_spec(spec, dir, options) == 1);

    RunOptions lax;
    lax.quiet = true;
    CHECK(run_spec(spec, fresh_dir("lax"), lax) == 0);
}

TEST_CASE("deviation run emits per-mode rows and gaps") {
    RunSpec spec = *preset_spec("nash-audit");
    spec.base.horizon = 600;  // keep the unit test quick
    spec.base.player = PlayerConfig::make(PlayerAlgorithm::Exp3P, 5, 600, 1e-6);
    spec.replicas = 2;
    spec.deviation_modes = {DeviationMode::AlwaysTruthful, DeviationMode::InflateMessage};

    RunOptions options;
    options.quiet = true;
    const fs::path dir = fresh_dir("deviation");
    CHECK(run_spec(spec, dir, options) == 0);

    const std::string summary = slurp(dir / "summary.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 5);  // header + 2x2 rows
    CHECK(summary.find("deviation") != std::string::npos);
    CHECK(summary.find("truthful") != std::string::npos);
    CHECK(summary.find("inflate-message") != std::string::npos);

    const std::string audit_text = slurp(dir / "audit.txt");
    CHECK(audit_text.find("audit.nash_gap.truthful") != std::string::npos);
    CHECK(audit_text.find("audit.nash_gap.inflate-message") != std::string::npos);
}

TEST_CASE("tau sweep emits one row per cell") {
    RunSpec spec = *preset_spec("tau-sweep");
    spec.base.horizon = 300;
    spec.base.player = PlayerConfig::make(PlayerAlgorithm::Exp3P, 10, 300, 1e-5);
    spec.base.offer_scale_override = 0.5;  // default scale tops 1 at toy horizons
    spec.sweep_taus = {1, 4};
    spec.replicas = 3;
    RunOptions options;
    options.quiet = true;
    options.jobs = 2;
    const fs::path dir = fresh_dir("sweep");
    CHECK(run_spec(spec, dir, options) == 0);
    const std::string summary = slurp(dir / "summary.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 7);  // header + 2*3 cells
    CHECK_FALSE(fs::exists(dir / "rounds.csv"));  // sweep mode skips round dumps
}
