#include <gtest/gtest.h>

#include <string>

#include "test_util.hpp"

namespace {

const std::string kCli = ADANORM_CLI_PATH;

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST(Cli, ConstantsPrintsTable) {
    const auto res = testutil::run_command(kCli + " constants --sigma0 1 --sigma1 0");
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_NE(res.output.find("c0       = 2.5"), std::string::npos) << res.output;
    EXPECT_NE(res.output.find("n_comp"), std::string::npos);
}

TEST(Cli, BoundsMarksSmallNoiseColumnInapplicable) {
    const auto res = testutil::run_command(kCli + " bounds --sigma0 1 --sigma1 0.25 --T 1024");
    EXPECT_EQ(res.exit_code, 0);
    EXPECT_NE(res.output.find("n/a (sigma1 > 1/8)"), std::string::npos) << res.output;
    const auto small = testutil::run_command(kCli + " bounds --sigma0 1 --sigma1 0.1 --T 1024");
    EXPECT_EQ(small.exit_code, 0);
    EXPECT_EQ(small.output.find("n/a"), std::string::npos) << small.output;
}

TEST(Cli, UnknownFlagExitsTwo) {
    EXPECT_EQ(testutil::run_command(kCli + " run --no-such-flag").exit_code, 2);
    EXPECT_EQ(testutil::run_command(kCli + " frobnicate").exit_code, 2);
}

TEST(Cli, MissingConfigFileExitsTwoAndNamesPath) {
    const auto res = testutil::run_command(kCli + " run --config /nonexistent/a.cfg --T 4");
    EXPECT_EQ(res.exit_code, 2);
    EXPECT_NE(res.output.find("/nonexistent/a.cfg"), std::string::npos) << res.output;
}

TEST(Cli, BadConfigKeyExitsTwo) {
    const auto res = testutil::run_command(kCli + " run --set 'noise.sigma9=1' --T 4");
    EXPECT_EQ(res.exit_code, 2);
    EXPECT_NE(res.output.find("sigma9"), std::string::npos) << res.output;
}

TEST(Cli, RunWritesFilesAndIsByteStable) {
    testutil::TempDir tmp;
    const std::string common = kCli + " run --set 'noise.sigma0=1' --set 'noise.sigma1=1' " +
                               "--set 'instrument.bias_every=8' --T 64 --seed 3 --out ";
    const auto a = testutil::run_command(common + q(tmp.path() / "a"));
    ASSERT_EQ(a.exit_code, 0) << a.output;
    const auto b = testutil::run_command(common + q(tmp.path() / "b"));
    ASSERT_EQ(b.exit_code, 0);
    for (const char* name : {"trajectory.csv", "summary.csv", "report.csv"}) {
        const std::string fa = testutil::read_file(tmp.path() / "a" / name);
        const std::string fb = testutil::read_file(tmp.path() / "b" / name);
        ASSERT_FALSE(fa.empty()) << name;
        ASSERT_EQ(fa, fb) << name;
    }
    const std::string traj = testutil::read_file(tmp.path() / "a" / "trajectory.csv");
    EXPECT_EQ(traj.substr(0, traj.find('\n')),
              "t,f,grad_norm_sq,sgrad_norm_sq,b_sq_before,b_sq_after,eta_t,eta_tilde_t,"
              "step_norm_sq,bias_est,bias_se,is_good");
}

TEST(Cli, VerifyAcceptsFreshTrajectoryAndCatchesTampering) {
    testutil::TempDir tmp;
    const std::string out = q(tmp.path() / "run");
    const auto run = testutil::run_command(
        kCli + " run --set 'noise.sigma0=1' --T 50 --seed 1 --out " + out);
    ASSERT_EQ(run.exit_code, 0) << run.output;
    const std::string traj_path = (tmp.path() / "run" / "trajectory.csv").string();
    const auto ok = testutil::run_command(kCli + " verify --set 'noise.sigma0=1' --trajectory '" +
                                          traj_path + "'");
    EXPECT_EQ(ok.exit_code, 0) << ok.output;

    // Halve one accumulator value: the recurrence check must fail.
    std::string text = testutil::read_file(traj_path);
    std::istringstream in(text);
    std::string line, out_text;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 12) {
            const bool trailing_empty = !line.empty() && line.back() == ',';
            std::vector<std::string> cells;
            std::string cell;
            std::istringstream ls(line);
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            cells[5] = "1.5";  // b_sq_after
            line.clear();
            for (std::size_t i = 0; i < cells.size(); ++i)
                line += (i ? "," : "") + cells[i];
            if (trailing_empty) line += ",";  // lost by the getline split
        }
        out_text += line + "\n";
    }
    testutil::write_file(tmp.path() / "tampered.csv", out_text);
    const auto bad = testutil::run_command(kCli + " verify --set 'noise.sigma0=1' --trajectory " +
                                           q(tmp.path() / "tampered.csv"));
    EXPECT_EQ(bad.exit_code, 1) << bad.output;
    EXPECT_NE(bad.output.find("fail accumulator_recurrence"), std::string::npos) << bad.output;
}

TEST(Cli, VerifyRejectsMalformedFile) {
    testutil::TempDir tmp;
    testutil::write_file(tmp.path() / "empty.csv", "");
    const auto res =
        testutil::run_command(kCli + " verify --trajectory " + q(tmp.path() / "empty.csv"));
    EXPECT_EQ(res.exit_code, 2) << res.output;
}

TEST(Cli, DivergentRunExitsThree) {
    testutil::TempDir tmp;
    const auto res = testutil::run_command(
        kCli + " run --set 'optimizer.name=gd' --set 'optimizer.eta=3' --T 2000 --out " +
        q(tmp.path() / "gd"));
    EXPECT_EQ(res.exit_code, 3) << res.output;
    EXPECT_NE(res.output.find("numerical abort"), std::string::npos) << res.output;
}

TEST(Cli, CorruptedOptimizerSweepExitsOneNamingFailedCheck) {
    testutil::TempDir tmp;
    const auto res = testutil::run_command(
        kCli + " sweep --set 'optimizer.name=adagrad_norm_overstep' " +
        "--set 'objective.w1_scale=10' --set 'run.horizons=64' --set 'run.seeds=3' " +
        "--set 'instrument.bias_every=off' --out " + q(tmp.path() / "bad"));
    EXPECT_EQ(res.exit_code, 1) << res.output;
    EXPECT_NE(res.output.find("step"), std::string::npos) << res.output;
}

TEST(Cli, SweepOutputsAreByteIdenticalAcrossWorkerCounts) {
    testutil::TempDir tmp;
    const std::string common = kCli + " sweep --set 'noise.sigma0=1' --set 'noise.sigma1=1' " +
                               "--set 'run.horizons=32, 64' --set 'run.seeds=4' " +
                               "--set 'instrument.bias_every=4' " +
                               "--set 'instrument.bias_samples=16' ";
    const auto w1 = testutil::run_command(common + "--workers 1 --out " + q(tmp.path() / "w1"));
    ASSERT_EQ(w1.exit_code, 0) << w1.output;
    const auto w4 = testutil::run_command(common + "--workers 4 --out " + q(tmp.path() / "w4"));
    ASSERT_EQ(w4.exit_code, 0) << w4.output;
    for (const char* name : {"summary.csv", "goodset.csv", "rate_fit.csv",
                             "bound_comparison.csv"}) {
        const std::string fa = testutil::read_file(tmp.path() / "w1" / name);
        const std::string fb = testutil::read_file(tmp.path() / "w4" / name);
        ASSERT_FALSE(fa.empty()) << name;
        ASSERT_EQ(fa, fb) << name;
    }
    const std::string summary = testutil::read_file(tmp.path() / "w1" / "summary.csv");
    EXPECT_EQ(summary.substr(0, summary.find('\n')),
              "T,seed,min_grad_sq,sum_grad_sq,b_T_sq,final_f,bad_count,coverage,diverged,"
              "wall_ms");
}

TEST(Cli, RequiresExactlyOneSubcommand) {
    EXPECT_EQ(testutil::run_command(kCli).exit_code, 2);
}
