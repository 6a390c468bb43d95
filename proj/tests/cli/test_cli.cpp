#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "epp/io.hpp"
#include "epp/operators.hpp"
#include "epp/phantom.hpp"
#include "epp_cli/cli.hpp"

#ifndef EPP_TEST_DATA_DIR
#error "EPP_TEST_DATA_DIR must be defined"
#endif

namespace epp::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Outcome {
    int code = 0;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "epp");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Outcome o;
    o.code = run(int(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        old_ = fs::current_path();
        dir_ = fs::temp_directory_path() /
               ("epp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        fs::current_path(dir_);
    }
    void TearDown() override {
        fs::current_path(old_);
        fs::remove_all(dir_);
    }

    static void expect_error(const Outcome& o, int code, const std::string& name) {
        EXPECT_EQ(o.code, code);
        EXPECT_EQ(o.err.rfind("epp: error: " + name + ": ", 0), 0u) << o.err;
        EXPECT_EQ(std::count(o.err.begin(), o.err.end(), '\n'), 1) << o.err;
    }

    fs::path old_, dir_;
};

TEST_F(CliTest, HelpDocumentsDefaults) {
    const Outcome o = invoke({"deblur", "--help"});
    EXPECT_EQ(o.code, 0);
    EXPECT_NE(o.out.find("--p"), std::string::npos);
    EXPECT_NE(o.out.find("1.01"), std::string::npos);
    EXPECT_NE(o.out.find("--shrink"), std::string::npos);
    EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(CliTest, NoiseFreeSynthIsPlainBlur) {
    const Outcome o = invoke({"synth", "--size", "32", "--sigma", "1.5", "--noise-level", "0", "--output", "b.eppf",
                              "--truth-output", "x.eppf"});
    ASSERT_EQ(o.code, 0) << o.err;
    const Image truth = read_image("x.eppf");
    EXPECT_EQ(truth, shapes_phantom(32));
    const BlurOperator blur = blur_from_psf(make_gaussian_psf(1.5, default_gaussian_size(1.5)), 32);
    EXPECT_EQ(read_image("b.eppf"), apply_blur(blur, truth));
}

TEST_F(CliTest, SynthNoiseLevelIsRecorded) {
    const Outcome o = invoke({"synth", "--size", "64", "--psf", "disk", "--radius", "2", "--noise-level", "0.05",
                              "--seed", "9", "--output", "b.eppf", "--sidecar", "b.json"});
    ASSERT_EQ(o.code, 0) << o.err;
    const json side = json::parse(slurp("b.json"));
    EXPECT_EQ(side["schema"], 1);
    EXPECT_NEAR(side["noise_level_vs_blurred"].get<double>(), 0.05, 1e-12);
    const double measured = side["noise_level_measured"].get<double>();
    EXPECT_GE(measured, 0.045);
    EXPECT_LE(measured, 0.055);
    EXPECT_EQ(side["seed"], 9);
    EXPECT_EQ(side["psf_kind"], "disk");
    EXPECT_EQ(side["psf_size"], 5);
    EXPECT_EQ(side["blur_exact_separable"], false);
}

TEST_F(CliTest, SynthIsDeterministic) {
    const std::vector<std::string> args = {"synth", "--size", "32", "--noise-level", "0.02", "--seed", "4",
                                           "--output", "b.pgm", "--sidecar", "b.json"};
    ASSERT_EQ(invoke(args).code, 0);
    const std::string img = slurp("b.pgm"), side = slurp("b.json");
    ASSERT_EQ(invoke(args).code, 0);
    EXPECT_EQ(slurp("b.pgm"), img);
    EXPECT_EQ(slurp("b.json"), side);
    std::vector<std::string> other = args;
    other[6] = "5";
    ASSERT_EQ(invoke(other).code, 0);
    EXPECT_NE(slurp("b.pgm"), img);
}

TEST_F(CliTest, DeblurReportHasDiagnostics) {
    ASSERT_EQ(invoke({"synth", "--size", "32", "--sigma", "1", "--noise-level", "0.01", "--output", "b.eppf",
                      "--sidecar", "b.json", "--truth-output", "x.eppf"})
                  .code,
              0);
    const Outcome o = invoke({"deblur", "-i", "b.eppf", "--sidecar", "b.json", "--p", "1.01", "-o", "r.eppf",
                              "--xk-output", "xk.eppf", "--x0-output", "x0.eppf", "--report", "r.json", "--truth",
                              "x.eppf"});
    ASSERT_EQ(o.code, 0) << o.err;
    const json rep = json::parse(slurp("r.json"));
    for (const char* key : {"schema", "basis", "p", "used_k", "gcv_argmin", "gcv_min", "irls_iterations",
                            "irls_converged", "gmres_iterations_total", "objective_initial", "objective_final",
                            "time_total", "time_correction", "relative_error", "xk_relative_error", "mssim",
                            "psf_kind", "psf_sigma", "projected_direct", "degraded"}) {
        EXPECT_TRUE(rep.contains(key)) << key;
    }
    EXPECT_EQ(rep["psf_sigma"], 1.0);
    EXPECT_EQ(json::parse(o.out), rep);
    // x = x_k + x_0.
    const Image x = read_image("r.eppf"), xk = read_image("xk.eppf"), x0 = read_image("x0.eppf");
    EXPECT_EQ(x, xk + x0);
}

TEST_F(CliTest, ExplicitKOverridesGcv) {
    ASSERT_EQ(invoke({"synth", "--size", "32", "--noise-level", "0.01", "--output", "b.eppf"}).code, 0);
    const Outcome o = invoke({"deblur", "-i", "b.eppf", "--basis", "svd", "--k", "100"});
    ASSERT_EQ(o.code, 0) << o.err;
    const json rep = json::parse(o.out);
    EXPECT_EQ(rep["used_k"], 100);
    EXPECT_EQ(rep["k_override"], true);
    EXPECT_TRUE(rep["gcv_argmin"].is_number_integer());
}

TEST_F(CliTest, OutOfRangePIsRejected) {
    ASSERT_EQ(invoke({"synth", "--size", "16", "--output", "b.eppf"}).code, 0);
    for (const char* p : {"2.5", "1", "2", "0.5"}) {
        const Outcome o = invoke({"deblur", "-i", "b.eppf", "--p", p});
        expect_error(o, 5, "E_PARAM");
        EXPECT_NE(o.err.find("1 < p < 2"), std::string::npos);
    }
}

TEST_F(CliTest, EvalIdentityMatchesGolden) {
    write_image(shapes_phantom(16), "truth.eppf");
    const Outcome o = invoke({"eval", "--restored", "truth.eppf", "--truth", "truth.eppf"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(o.out, slurp(fs::path(EPP_TEST_DATA_DIR) / "eval_identity.golden.json"));
}

TEST_F(CliTest, EvalReadsNoiseLevelFromSidecar) {
    ASSERT_EQ(invoke({"synth", "--size", "32", "--noise-level", "0.03", "--output", "b.eppf", "--sidecar", "b.json",
                      "--truth-output", "x.eppf"})
                  .code,
              0);
    const Outcome o = invoke({"eval", "--restored", "b.eppf", "--truth", "x.eppf", "--sidecar", "b.json"});
    ASSERT_EQ(o.code, 0) << o.err;
    const json j = json::parse(o.out);
    const json side = json::parse(slurp("b.json"));
    EXPECT_EQ(j["noise_level"], side["noise_level_measured"]);
    EXPECT_GT(j["relative_error"].get<double>(), 0.0);
    EXPECT_LT(j["mssim"].get<double>(), 1.0);
}

TEST_F(CliTest, EvalBatchEmitsOneRecordPerPair) {
    fs::create_directories("restored");
    fs::create_directories("truth");
    for (int i = 0; i < 3; ++i) {
        const std::string name = "img" + std::to_string(i) + ".eppf";
        write_image(shapes_phantom(16 + i), "truth/" + name);
        write_image(shapes_phantom(16 + i), "restored/" + name);
    }
    write_image(shapes_phantom(16), "restored/unpaired.eppf");
    const Outcome o = invoke({"eval", "--restored-dir", "restored", "--truth-dir", "truth"});
    ASSERT_EQ(o.code, 0) << o.err;
    std::istringstream lines(o.out);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        const json j = json::parse(line);
        EXPECT_EQ(j["relative_error"], 0.0);
        ++count;
    }
    EXPECT_EQ(count, 3);
}

TEST_F(CliTest, ErrorsAreSingleLineWithCodes) {
    expect_error(invoke({"deblur", "-i", "missing.eppf"}), 3, "E_IO");
    {
        std::ofstream bad("bad.pgm");
        bad << "P5\n2 two\n255\n";
    }
    expect_error(invoke({"deblur", "-i", "bad.pgm"}), 4, "E_FORMAT");
    expect_error(invoke({"deblur", "--frobnicate"}), 2, "E_USAGE");
    expect_error(invoke({}), 2, "E_USAGE");
    expect_error(invoke({"synth", "--output", "b.eppf", "--noise-level", "-1"}), 5, "E_PARAM");
    expect_error(invoke({"synth", "--output", "b.eppf", "--size", "8", "--sigma", "3"}), 5, "E_PARAM");
    write_image(shapes_phantom(16), "a.eppf");
    write_image(shapes_phantom(20), "c.eppf");
    expect_error(invoke({"eval", "--restored", "a.eppf", "--truth", "c.eppf"}), 5, "E_PARAM");
}

}  // namespace
}  // namespace epp::cli
