#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "antcolony/cli.hpp"

using namespace antcolony;
using namespace antcolony::cli;
namespace fs = std::filesystem;

namespace {

RunConfig parse_run(std::vector<std::string> args) {
    args.insert(args.begin(), "run");
    return std::get<RunConfig>(parse_args(args));
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("antsim_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST(ParseArgs, RunDefaults) {
    const RunConfig cfg = parse_run({"--habitat", "cross.pgm", "--iters", "1000", "--seed", "1"});
    EXPECT_EQ(cfg.habitat_path, "cross.pgm");
    EXPECT_EQ(cfg.iterations, 1000u);
    EXPECT_EQ(cfg.seed, 1u);
    const Params prm = cfg.to_params();
    EXPECT_EQ(prm, Params{});
    EXPECT_EQ(prm.eta, 0.07);
    EXPECT_EQ(prm.k, 0.015);
    EXPECT_EQ(prm.beta, 3.5);
    EXPECT_EQ(prm.delta, 0.2);
    EXPECT_EQ(prm.p, 1.5);
    EXPECT_EQ(prm.density, 0.3);
    EXPECT_TRUE(prm.exclusion);
}

TEST(ParseArgs, Overrides) {
    EXPECT_EQ(parse_run({"--habitat", "x.pgm", "--beta", "4.5"}).to_params().beta, 4.5);
    const RunConfig cfg = parse_run({"--habitat", "x.pgm", "--kappa", "0.011", "--metric", "ulam", "--a", "2",
                                     "--b", "1", "--c", "1", "--allow-stacking", "--swap", "100:map.pgm",
                                     "--snapshot-every", "50", "--pairing", "flat", "--density", "0.2",
                                     "--eta", "0.1", "--p", "0", "--delta", "0.3", "--out", "o"});
    const Params prm = cfg.to_params();
    EXPECT_EQ(prm.k, 0.011);
    EXPECT_EQ(prm.metric, Metric::Ulam);
    EXPECT_EQ(prm.pairing, WindowPairing::Flat);
    EXPECT_DOUBLE_EQ(prm.weights.a(), 0.5);
    EXPECT_FALSE(prm.exclusion);
    EXPECT_EQ(prm.density, 0.2);
    EXPECT_EQ(prm.eta, 0.1);
    EXPECT_EQ(prm.p, 0.0);
    EXPECT_EQ(prm.delta, 0.3);
    ASSERT_TRUE(cfg.swap.has_value());
    EXPECT_EQ(cfg.swap->step, 100u);
    EXPECT_EQ(cfg.swap->path, "map.pgm");
    EXPECT_EQ(cfg.out_dir, "o");
}

TEST(ParseArgs, Errors) {
    EXPECT_THROW(parse_run({"--iters", "10"}), UsageError);
    EXPECT_THROW(parse_run({"--habitat", "x.pgm", "--iters", "ten"}), UsageError);
    EXPECT_THROW(parse_run({"--habitat", "x.pgm", "--swap", "100"}), UsageError);
    EXPECT_THROW(parse_run({"--habitat", "x.pgm", "--swap", "abc:map.pgm"}), UsageError);
    EXPECT_THROW(parse_run({"--habitat", "x.pgm", "--bogus"}), UsageError);
    EXPECT_THROW(parse_run({"--habitat", "x.pgm", "--metric", "gestalt"}), UsageError);
    EXPECT_THROW(parse_run({"--habitat", "x.pgm", "--kappa", "1.5"}), UsageError);
    EXPECT_THROW(parse_args({}), UsageError);
    EXPECT_THROW(parse_args({"metrics", "1", "2"}), UsageError);
    EXPECT_THROW(parse_args({"gen", "spiral", "--out", "x.pgm"}), UsageError);
}

TEST(ParseArgs, UsageTextOnFailure) {
    std::ostringstream out, err;
    EXPECT_EQ(main_entry({"run", "--nope"}, out, err), 2);
    EXPECT_NE(err.str().find("--habitat"), std::string::npos);
}

TEST(SwapSpec, Parsing) {
    EXPECT_EQ(parse_swap("100:map.pgm"), (SwapSpec{100, "map.pgm"}));
    EXPECT_EQ(parse_swap("7:dir/a:b.pgm"), (SwapSpec{7, "dir/a:b.pgm"}));
    EXPECT_THROW(parse_swap(":x"), std::invalid_argument);
    EXPECT_THROW(parse_swap("5:"), std::invalid_argument);
    EXPECT_THROW(parse_swap("-5:x"), std::invalid_argument);
}

TEST(Config, SerializeParseIsIdempotent) {
    RunConfig cfg = parse_run({"--habitat", "a b.pgm", "--kappa", "0.019", "--beta", "2.5", "--a", "0.1",
                               "--swap", "100:map.pgm", "--snapshot-at", "50,100,150", "--allow-stacking",
                               "--metric", "ulam"});
    const std::string text = serialize_config(cfg);
    const RunConfig back = parse_config(text);
    EXPECT_EQ(back, cfg);
    EXPECT_EQ(serialize_config(back), text);
    EXPECT_EQ(parse_config(serialize_config(RunConfig{})), RunConfig{});
    EXPECT_THROW(parse_config("colour=red\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("iters\n"), std::invalid_argument);
}

TEST(Config, FileIsBaseAndFlagsOverride) {
    const fs::path dir = scratch_dir("config");
    RunConfig cfg;
    cfg.habitat_path = "h.pgm";
    cfg.beta = 4.5;
    cfg.iterations = 12;
    write_file_bytes(dir / "config.txt", serialize_config(cfg));
    const RunConfig loaded = parse_run({"--config", (dir / "config.txt").string()});
    EXPECT_EQ(loaded, cfg);
    const RunConfig overridden = parse_run({"--config", (dir / "config.txt").string(), "--iters", "3"});
    EXPECT_EQ(overridden.iterations, 3u);
    EXPECT_EQ(overridden.beta, 4.5);
}

TEST(Config, SnapshotSteps) {
    RunConfig cfg;
    cfg.iterations = 10;
    EXPECT_EQ(cfg.snapshot_steps(), (std::vector<std::uint64_t>{10}));
    cfg.snapshot_every = 4;
    EXPECT_EQ(cfg.snapshot_steps(), (std::vector<std::uint64_t>{4, 8, 10}));
    cfg.snapshot_at = {1, 4};
    EXPECT_EQ(cfg.snapshot_steps(), (std::vector<std::uint64_t>{1, 4, 8, 10}));
    cfg.iterations = 0;
    cfg.snapshot_every = 0;
    cfg.snapshot_at.clear();
    EXPECT_TRUE(cfg.snapshot_steps().empty());
}

TEST(GenCross, Geometry) {
    const Habitat h = gen_cross(100, 100, 0, 255, 20);
    std::size_t fg = 0;
    for (auto v : h.pixels().cells()) fg += v == 0;
    EXPECT_EQ(fg, 20u * 100 + 20u * 100 - 20u * 20);
    // Arms centred on rows/cols 40..59.
    EXPECT_EQ(h.pixels()(40, 0), 0);
    EXPECT_EQ(h.pixels()(39, 0), 255);
    EXPECT_EQ(h.pixels()(0, 59), 0);
    EXPECT_EQ(h.pixels()(0, 60), 255);

    const Habitat tiny = gen_cross(3, 3, 9, 1, 1);
    EXPECT_EQ(tiny.pixels().cells().size(), 9u);
    const std::vector<std::uint8_t> plus{1, 9, 1, 9, 9, 9, 1, 9, 1};
    EXPECT_TRUE(std::ranges::equal(tiny.pixels().cells(), plus));

    EXPECT_EQ(gen_cross(40, 30, 0, 255, 6), gen_cross(40, 30, 0, 255, 6));
    EXPECT_THROW(gen_cross(10, 10, 5, 5, 2), std::invalid_argument);
    EXPECT_THROW(gen_cross(10, 10, 0, 255, 11), std::invalid_argument);
    EXPECT_THROW(gen_cross(10, 10, 0, 255, 0), std::invalid_argument);
}

TEST(MetricsCommand, PrintsWorkedExample) {
    std::ostringstream out, err;
    const int rc = main_entry({"metrics", "10", "30", "70", "20", "50", "80", "40", "60", "100", "10", "30", "70",
                               "20", "50", "80", "40", "60", "15"},
                              out, err);
    EXPECT_EQ(rc, 0);
    const std::string text = out.str();
    EXPECT_NE(text.find("pi1 = 1 3 7 2 5 8 4 6 9\n"), std::string::npos);
    EXPECT_NE(text.find("pi2 = 1 4 8 3 6 9 5 7 2\n"), std::string::npos);
    EXPECT_NE(text.find("s = 1 3 4 5 6 7 8 9 2\n"), std::string::npos);
    EXPECT_NE(text.find("s* = 2 9 8 7 6 5 4 3 1\n"), std::string::npos);
    EXPECT_NE(text.find("delta1 = 1\n"), std::string::npos);
    EXPECT_NE(text.find("delta2 = 7\n"), std::string::npos);
    EXPECT_NE(text.find("tau_u = 0.75\n"), std::string::npos);
    EXPECT_NE(text.find("tau_r = -0.75\n"), std::string::npos);
    EXPECT_NE(text.find("tau = 0.75\n"), std::string::npos);
    EXPECT_NE(text.find("histogram_diff = 2\n"), std::string::npos);
}

TEST(GenCommand, WritesPgm) {
    const fs::path dir = scratch_dir("gen");
    std::ostringstream out, err;
    ASSERT_EQ(main_entry({"gen", "cross", "--out", (dir / "c.pgm").string(), "--width", "30", "--height", "20",
                          "--thickness", "4"},
                         out, err),
              0);
    EXPECT_EQ(load_pgm_file(dir / "c.pgm"), gen_cross(30, 20, 0, 255, 4));
    ASSERT_EQ(main_entry({"gen", "homogeneous", "--out", (dir / "h.pgm").string(), "--value", "77"}, out, err), 0);
    EXPECT_EQ(load_pgm_file(dir / "h.pgm"), homogeneous_habitat(100, 100, 77));
    EXPECT_EQ(main_entry({"gen", "cross", "--out", (dir / "bad.pgm").string(), "--fg", "3", "--bg", "3"}, out, err),
              1);
}

TEST(RunExperiment, ZeroIterationsWritesHeaderOnly) {
    const fs::path dir = scratch_dir("zero");
    write_file_bytes(dir / "h.pgm", save_pgm(gen_cross(20, 20, 0, 255, 4).pixels()));
    RunConfig cfg;
    cfg.habitat_path = (dir / "h.pgm").string();
    cfg.out_dir = (dir / "out").string();
    cfg.iterations = 0;
    std::ostringstream out, err;
    ASSERT_EQ(run_experiment(cfg, out, err), 0) << err.str();
    EXPECT_EQ(read_file_bytes(dir / "out" / "report.csv"), "step,total_pheromone,gini,max_sigma\n");
    EXPECT_EQ(parse_config(read_file_bytes(dir / "out" / "config.txt")), cfg);
    std::size_t snaps = 0;
    for (const auto& e : fs::directory_iterator(dir / "out")) snaps += e.path().extension() == ".pgm";
    EXPECT_EQ(snaps, 0u);
}

TEST(RunExperiment, WritesSnapshotsReportAndDumps) {
    const fs::path dir = scratch_dir("small");
    write_file_bytes(dir / "h.pgm", save_pgm(gen_cross(20, 20, 0, 255, 4).pixels()));
    write_file_bytes(dir / "inv.pgm", save_pgm(gen_cross(20, 20, 255, 0, 4).pixels()));
    std::ostringstream out, err;
    const int rc = main_entry({"run", "--habitat", (dir / "h.pgm").string(), "--out", (dir / "out").string(),
                               "--iters", "12", "--snapshot-every", "5", "--swap", "6:" + (dir / "inv.pgm").string(),
                               "--dump-fields"},
                              out, err);
    ASSERT_EQ(rc, 0) << err.str();
    for (const char* name : {"snap_000005.pgm", "snap_000010.pgm", "snap_000012.pgm", "field_000012.bin",
                             "report.csv", "config.txt"}) {
        EXPECT_TRUE(fs::exists(dir / "out" / name)) << name;
    }
    const PheromoneField f = load_field_dump(read_file_bytes(dir / "out" / "field_000012.bin"));
    EXPECT_EQ(snapshot(f), load_pgm_file(dir / "out" / "snap_000012.pgm").pixels());
    EXPECT_NE(out.str().find("steps=12"), std::string::npos);
    EXPECT_NE(out.str().find("final_gini="), std::string::npos);

    // The echoed config reproduces the run.
    const fs::path echo = dir / "out" / "config.txt";
    ASSERT_EQ(main_entry({"run", "--config", echo.string(), "--out", (dir / "again").string()}, out, err), 0);
    EXPECT_EQ(read_file_bytes(dir / "out" / "report.csv"), read_file_bytes(dir / "again" / "report.csv"));
    EXPECT_EQ(read_file_bytes(dir / "out" / "snap_000012.pgm"), read_file_bytes(dir / "again" / "snap_000012.pgm"));
}

TEST(RunExperiment, ReportsIoFailures) {
    RunConfig cfg;
    cfg.habitat_path = "/nonexistent/habitat.pgm";
    cfg.out_dir = scratch_dir("io").string();
    std::ostringstream out, err;
    EXPECT_EQ(run_experiment(cfg, out, err), 1);
    EXPECT_NE(err.str().find("/nonexistent/habitat.pgm"), std::string::npos);
}

TEST(RunExperiment, HomogeneousGainMakesNoDifference) {
    const fs::path dir = scratch_dir("homog");
    write_file_bytes(dir / "z.pgm", save_pgm(homogeneous_habitat(30, 30, 128).pixels()));
    std::ostringstream out, err;
    for (const char* gain : {"1.5", "0"}) {
        ASSERT_EQ(main_entry({"run", "--habitat", (dir / "z.pgm").string(), "--out", (dir / gain).string(),
                              "--iters", "40", "--snapshot-every", "10", "--p", gain},
                             out, err),
                  0);
    }
    for (const char* name : {"snap_000010.pgm", "snap_000040.pgm", "report.csv"}) {
        EXPECT_EQ(read_file_bytes(dir / "1.5" / name), read_file_bytes(dir / "0" / name)) << name;
    }
}

// Every experiment of the published protocol must be expressible with flags alone.
TEST(Experiments, AllTwelveConfigsParse) {
    struct Case {
        const char* label;
        std::vector<std::string> flags;
    };
    const std::vector<Case> cases{
        {"A1", {"--habitat", "cross.pgm"}},
        {"A2", {"--habitat", "cross.pgm", "--allow-stacking"}},
        {"A3", {"--habitat", "cross.pgm", "--kappa", "0.011"}},
        {"A4", {"--habitat", "cross.pgm", "--kappa", "0.019"}},
        {"A5", {"--habitat", "cross.pgm", "--beta", "4.5"}},
        {"A6", {"--habitat", "cross.pgm", "--beta", "2.5"}},
        {"Z", {"--habitat", "homogeneous.pgm", "--allow-stacking"}},
        {"B", {"--habitat", "einstein.pgm"}},
        {"C", {"--habitat", "map.pgm"}},
        {"D", {"--habitat", "marble.pgm"}},
        {"E", {"--habitat", "road.pgm"}},
        {"Fig3", {"--habitat", "einstein.pgm", "--swap", "100:map.pgm"}},
    };
    std::set<std::string> distinct;
    for (const auto& c : cases) {
        std::vector<std::string> args = c.flags;
        args.insert(args.end(), {"--iters", "1000", "--snapshot-every", "100"});
        const RunConfig cfg = parse_run(args);
        const Params prm = cfg.to_params();
        EXPECT_EQ(cfg.iterations, 1000u) << c.label;
        EXPECT_EQ(prm.p, 1.5) << c.label;
        distinct.insert(serialize_config(cfg));
    }
    EXPECT_EQ(distinct.size(), cases.size());
    EXPECT_FALSE(parse_run(cases[1].flags).to_params().exclusion);
    EXPECT_EQ(parse_run(cases[2].flags).to_params().k, 0.011);
    EXPECT_EQ(parse_run(cases[3].flags).to_params().k, 0.019);
    EXPECT_EQ(parse_run(cases[4].flags).to_params().beta, 4.5);
    EXPECT_EQ(parse_run(cases[5].flags).to_params().beta, 2.5);
    EXPECT_EQ(parse_run(cases[11].flags).swap, (SwapSpec{100, "map.pgm"}));
}
