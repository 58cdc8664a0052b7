#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "adaplus/bench/compare.hpp"
#include "adaplus/bench/record_io.hpp"
#include "adaplus/bench/run_config.hpp"
#include "adaplus/bench/runner.hpp"

using namespace adaplus;
using namespace adaplus::bench;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("adaplus_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* quad_config = R"(
# four-dimensional quadratic
problem = quadratic
problem.dim = 4
problem.condition_number = 100
optimizer = adaplus
epochs = 3
steps_per_epoch = 10
milestones = 2
seeds = 2, 1
)";

} // namespace

TEST(RunConfig, ParsesAndResolvesDefaults) {
    const RunConfig cfg = parse(quad_config);
    EXPECT_EQ(cfg.problem.kind, "quadratic");
    EXPECT_EQ(cfg.problem.dim, 4u);
    EXPECT_EQ(cfg.kernel, Kernel::adaplus);
    EXPECT_EQ(cfg.hp.lr, 1e-3);
    EXPECT_EQ(cfg.hp.weight_decay, 1e-2);
    EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{1, 2}));
    EXPECT_EQ(cfg.schedule.milestones, (std::vector<std::uint64_t>{2}));
}

TEST(RunConfig, KernelDefaultsThenOverrides) {
    const RunConfig cfg = parse("optimizer = adam\nlr = 0.01\nbeta1 = 0.5\nnesterov = true\n");
    EXPECT_EQ(cfg.kernel, Kernel::adam);
    EXPECT_EQ(cfg.hp.lr, 0.01);
    EXPECT_EQ(cfg.hp.beta1, 0.5);
    EXPECT_EQ(cfg.hp.weight_decay, 0.0);
    EXPECT_TRUE(cfg.hp.use_nesterov);
}

TEST(RunConfig, CanonicalFormAndHashAreFrozen) {
    const RunConfig cfg = parse(quad_config);
    EXPECT_EQ(cfg.canonical(), "belief=true\n"
                               "beta1=0.90000000000000002\n"
                               "beta2=0.999\n"
                               "decay_factor=0.10000000000000001\n"
                               "decoupled_decay=true\n"
                               "epochs=3\n"
                               "eps=1e-08\n"
                               "init=uniform\n"
                               "init.scale=1\n"
                               "log_every=1\n"
                               "lr=0.001\n"
                               "milestones=2\n"
                               "nesterov=true\n"
                               "noise=none\n"
                               "noise.scale=0\n"
                               "optimizer=adaplus\n"
                               "problem=quadratic\n"
                               "problem.condition_number=100\n"
                               "problem.curvature=0.001\n"
                               "problem.dim=4\n"
                               "problem.g_mag=10\n"
                               "problem.margin=0.5\n"
                               "problem.n_samples=500\n"
                               "problem.seed=0\n"
                               "seeds=1,2\n"
                               "steps_per_epoch=10\n"
                               "weight_decay=0.01\n");
    // FNV-1a of the text above, computed independently.
    EXPECT_EQ(cfg.hash(), "897e9eecc813256b");
    // Key order and whitespace do not matter.
    EXPECT_EQ(parse("seeds=1,2\nsteps_per_epoch=10\nmilestones=2\nepochs=3\noptimizer=adaplus\n"
                    "problem.condition_number=100\nproblem.dim=4\nproblem=quadratic\n")
                  .hash(),
              cfg.hash());
}

TEST(RunConfig, Errors) {
    EXPECT_THROW(parse("bogus = 1\n"), ConfigError);
    EXPECT_THROW(parse("lr = 1\nlr = 2\n"), ConfigError);
    EXPECT_THROW(parse("lr = fast\n"), ConfigError);
    EXPECT_THROW(parse("optimizer = lion\n"), ConfigError);
    EXPECT_THROW(parse("problem = mnist\n"), ConfigError);
    EXPECT_THROW(parse("seeds = \n"), ConfigError);
    EXPECT_THROW(parse("seeds = 1,1\n"), ConfigError);
    EXPECT_THROW(parse("milestones = 5,3\n"), ConfigError);
    EXPECT_THROW(parse("epochs = 0\n"), ConfigError);
    EXPECT_THROW(parse("beta1 = 1\n"), ConfigError);
    EXPECT_THROW(parse("no equals sign\n"), ConfigError);
    EXPECT_THROW(parse("epochs = -3\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.txt"), ConfigError);
}

TEST(Run, OneDimensionalQuadraticConverges) {
    const RunConfig cfg = parse("problem = quadratic\nproblem.dim = 1\nproblem.condition_number = 1\n"
                                "optimizer = adaplus\nepochs = 1\nsteps_per_epoch = 500\nseeds = 0\n"
                                "init = constant\ninit.scale = 0.5\n");
    const RunRecord rec = run(cfg);
    ASSERT_FALSE(rec.aborted);
    ASSERT_EQ(rec.rows.size(), 500u);
    EXPECT_LT(rec.rows.back().loss, 1e-6);
    EXPECT_EQ(rec.summary.final_loss, rec.rows.back().loss);
}

TEST(Run, IsDeterministicAcrossThreadCounts) {
    RunConfig cfg = parse(quad_config);
    cfg.seeds = {1, 2, 3, 4};
    cfg.noise = NoiseKind::gaussian_additive;
    cfg.noise_scale = 0.1;
    RunRecord a = run(cfg, 1);
    RunRecord b = run(cfg, 4);
    a.summary.wall_time_seconds = b.summary.wall_time_seconds = 0.0;
    EXPECT_EQ(a, b);
}

TEST(Run, RowsOrderedAndScheduleApplied) {
    const RunConfig cfg = parse("problem = quadratic\nproblem.dim = 2\noptimizer = adamw\nepochs = 10\n"
                                "steps_per_epoch = 4\nlog_every = 2\nmilestones = 5\nseeds = 3,1\n");
    const RunRecord rec = run(cfg);
    ASSERT_EQ(rec.rows.size(), 2u * 10u * 2u);
    for (std::size_t i = 1; i < rec.rows.size(); ++i) {
        const auto& p = rec.rows[i - 1];
        const auto& q = rec.rows[i];
        EXPECT_TRUE(std::tie(p.seed, p.epoch, p.step) < std::tie(q.seed, q.epoch, q.step));
    }
    for (const auto& r : rec.rows) {
        EXPECT_EQ(r.step % 2, 0u);
        EXPECT_NEAR(r.lr, r.epoch < 5 ? 1e-3 : 1e-4, 1e-18);
    }
    EXPECT_EQ(rec.rows.front().seed, 1u);
}

TEST(Run, NumericalBlowUpIsFlagged) {
    const RunConfig cfg = parse("problem = rosenbrock\nproblem.dim = 2\noptimizer = sgdm\nlr = 1e6\n"
                                "epochs = 1\nsteps_per_epoch = 50\ninit = constant\ninit.scale = 3\n");
    const RunRecord rec = run(cfg);
    EXPECT_TRUE(rec.aborted);
    EXPECT_FALSE(rec.abort_reason.empty());
    const fs::path dir = temp_dir("aborted");
    EXPECT_THROW(emit(rec, Format::csv, dir / "x.csv"), IoError);
    EXPECT_FALSE(fs::exists(dir / "x.csv"));
    emit(rec, Format::json, dir / "x.json");
    EXPECT_TRUE(load_record(dir / "x.json").aborted);
}

TEST(Emit, EmptyRecordIsHeaderOnly) {
    const fs::path dir = temp_dir("empty");
    emit(RunRecord{}, Format::csv, dir / "e.csv");
    EXPECT_EQ(slurp(dir / "e.csv"), "seed,epoch,step,lr,loss,grad_norm,param_norm\n");
}

TEST(Emit, ThreeRowsFourLines) {
    RunRecord rec;
    rec.rows = {{1, 0, 1, 0.1, 1.0 / 3.0, 2.0, 3.0}, {1, 0, 2, 0.1, 0.25, 1.0, 2.0}, {1, 1, 3, 0.01, 0.125, 0.5, 1.0}};
    const fs::path dir = temp_dir("three");
    emit(rec, Format::csv, dir / "t.csv");
    const std::string text = slurp(dir / "t.csv");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
    EXPECT_NE(text.find("0.33333333333333331"), std::string::npos);
    EXPECT_EQ(load_record(dir / "t.csv").rows, rec.rows);
}

TEST(Emit, JsonRoundTripIsLossless) {
    RunConfig cfg = parse(quad_config);
    cfg.noise = NoiseKind::gaussian_additive;
    cfg.noise_scale = 0.3;
    const RunRecord rec = run(cfg);
    const fs::path dir = temp_dir("json");
    emit(rec, Format::json, dir / "r.json");
    EXPECT_EQ(load_record(dir / "r.json"), rec);
}

TEST(Emit, UnwritablePath) {
    EXPECT_THROW(emit(RunRecord{}, Format::csv, "/nonexistent_dir/x.csv"), IoError);
}

TEST(Compare, SingleRecordEqualsSummary) {
    const RunRecord rec = run(parse(quad_config));
    const ComparisonTable table = compare({rec});
    ASSERT_EQ(table.columns.size(), 1u);
    EXPECT_DOUBLE_EQ(table.cells[0][0].mean, rec.summary.final_loss);
    EXPECT_DOUBLE_EQ(table.cells[1][0].mean, rec.summary.best_loss);
    EXPECT_EQ(table.aligned_step, 30u);
}

TEST(Compare, IdenticalSeedsHaveZeroSpread) {
    const RunConfig cfg = parse("problem = quadratic\nproblem.dim = 3\nproblem.condition_number = 10\n"
                                "init = constant\nepochs = 2\nsteps_per_epoch = 20\nseeds = 1,2,3\n");
    const ComparisonTable table = compare({run(cfg)});
    EXPECT_EQ(table.cells[0][0].stddev, 0.0);
    EXPECT_EQ(table.cells[1][0].stddev, 0.0);
}

TEST(Compare, AdaplusBeatsAdamwInLargeGradientRegime) {
    const std::string base = "problem = large_grad_small_curvature\nproblem.g_mag = 10\nproblem.curvature = 1e-3\n"
                             "init = zeros\nepochs = 1\nsteps_per_epoch = 50\n";
    const RunRecord plus = run(parse(base + "optimizer = adaplus\n"));
    const RunRecord adamw = run(parse(base + "optimizer = adamw\n"));
    const ComparisonTable table = compare({plus, adamw});
    EXPECT_EQ(table.aligned_step, 50u);
    EXPECT_LT(table.cells[0][0].mean, table.cells[0][1].mean);
    EXPECT_EQ(table.best_column[0], 0u);
    EXPECT_NE(table.to_markdown().find("**"), std::string::npos);
}

TEST(Compare, AlignsOnCommonStep) {
    const RunRecord longer = run(parse(quad_config));
    RunConfig shorter_cfg = parse(quad_config);
    shorter_cfg.epochs = 2;
    shorter_cfg.kernel = Kernel::adam;
    const RunRecord shorter = run(shorter_cfg);
    const ComparisonTable table = compare({longer, shorter});
    EXPECT_EQ(table.aligned_step, 20u);
}

TEST(Compare, RejectsMismatchedProblems) {
    const RunRecord a = run(parse(quad_config));
    const RunRecord b = run(parse("problem = rosenbrock\nproblem.dim = 4\nepochs = 1\nsteps_per_epoch = 5\n"));
    EXPECT_THROW(compare({a, b}), CompareError);
    EXPECT_THROW(compare({}), CompareError);
}
