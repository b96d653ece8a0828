#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "analytic_server.hpp"
#include "ddugm_cli.hpp"
#include "test_support.hpp"

using namespace ddugm;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ddugm");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::cli_main(int(argv.size()), argv.data(), {out, err});
  return {code, out.str(), err.str()};
}

double metric_after(const std::string& text, const std::string& label) {
  std::smatch m;
  const std::regex re(label + ": psnr ([-0-9.e+inf]+) dB");
  if (!std::regex_search(text, m, re)) throw std::runtime_error("no '" + label + "' line in:\n" + text);
  return std::stod(m[1]);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = ddugm::testing::temp_dir("cli");
    ::unsetenv("DDUGM_SEED");
  }
  void TearDown() override { ::unsetenv("DDUGM_SEED"); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::filesystem::path dir_;
};

}  // namespace

TEST_F(CliTest, PhantomAgainstItselfIsPerfect) {
  const auto ph = run({"phantom", "--t", "8", "--h", "64", "--w", "64", "--seed", "7", "-o", path("ph.ddt")});
  ASSERT_EQ(ph.code, 0) << ph.err;
  EXPECT_NE(ph.out.find("spec frames 8, height 64, width 64, seed 7, beat "), std::string::npos) << ph.out;
  EXPECT_EQ(read_complex_tensor(path("ph.ddt")).shape(), (Shape3{8, 64, 64}));
  EXPECT_TRUE(std::filesystem::exists(path("ph_k.ddt")));
  const auto m = run({"metrics", path("ph.ddt"), path("ph.ddt"), "--json", path("m.json")});
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_NE(m.out.find("PSNR inf\n"), std::string::npos) << m.out;
  EXPECT_NE(m.out.find("SSIM 1\n"), std::string::npos) << m.out;
  EXPECT_NE(m.out.find("MSE 0\n"), std::string::npos) << m.out;
  std::ifstream js(path("m.json"));
  EXPECT_EQ(nlohmann::json::parse(js)["psnr_db"], "inf");
}

TEST_F(CliTest, MaskReportsAcceleration) {
  const auto c = run({"mask", "--spec", "cartesian:R=4", "--t", "8", "--h", "64", "--w", "64", "-o", path("m.ddt")});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("acceleration 4\n"), std::string::npos) << c.out;
  EXPECT_EQ(read_mask(path("m.ddt")).shape(), (Shape3{8, 64, 64}));
  const auto r = run({"mask", "--spec", "radial:R=6", "--t", "4", "--h", "32", "--w", "32", "-o", path("r.ddt")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("spokes "), std::string::npos);
}

TEST_F(CliTest, ReconPipelineBeatsZeroFilled) {
  ASSERT_EQ(run({"phantom", "--t", "4", "--h", "32", "--w", "32", "--seed", "7", "-o", path("truth.ddt")}).code, 0);
  ASSERT_EQ(run({"phantom", "--t", "8", "--h", "32", "--w", "32", "--seed", "100", "-o", path("prior.ddt")}).code, 0);
  ASSERT_EQ(run({"mask", "--spec", "cartesian:R=2", "--t", "4", "--h", "32", "--w", "32", "-o", path("mask.ddt")}).code,
            0);
  std::ofstream(path("cfg.json")) << R"({"steps": 80, "weight_floor": 0.3, "hankel_rank": 1, "log_every": 10})";
  const auto r = run({"recon", "--input", path("truth_k.ddt"), "--mask", path("mask.ddt"), "--config", path("cfg.json"),
                      "--score-k", "gaussian", "--score-i", "gaussian", "--prior", path("prior.ddt"), "--reference",
                      path("truth.ddt"), "--output", path("rec.ddt"), "--log", path("log.csv"), "--report",
                      path("report.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("config {"), std::string::npos);
  EXPECT_NE(r.out.find("\"steps\":80"), std::string::npos) << r.out;
  EXPECT_GT(metric_after(r.out, "reconstruction"), metric_after(r.out, "zero-filled")) << r.out;
  EXPECT_EQ(read_complex_tensor(path("rec.ddt")).shape(), (Shape3{4, 32, 32}));
  std::ifstream csv(path("log.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "step,sigma,psnr,dc_residual");
  std::ifstream rep(path("report.json"));
  const auto j = nlohmann::json::parse(rep);
  EXPECT_TRUE(j.contains("zero_filled"));
  EXPECT_EQ(j["config"]["hankel_rank"], 1);
}

TEST_F(CliTest, SeedEnvironmentOverride) {
  ASSERT_EQ(run({"phantom", "--t", "2", "--h", "16", "--w", "16", "-o", path("t.ddt")}).code, 0);
  ASSERT_EQ(run({"mask", "--spec", "cartesian:R=2", "--t", "2", "--h", "16", "--w", "16", "-o", path("m.ddt")}).code, 0);
  std::ofstream(path("c5.json")) << R"({"steps": 10, "seed": 5})";
  std::ofstream(path("c9.json")) << R"({"steps": 10, "seed": 9})";
  const auto base = std::vector<std::string>{"recon", "--input", path("t_k.ddt"), "--mask", path("m.ddt"),
                                             "--score-k", "gaussian:m=0,tau=3", "--score-i", "gaussian:m=0.2:0,tau=0.5"};
  auto with = [&](std::string cfg, std::string out) {
    auto a = base;
    a.insert(a.end(), {"--config", path(cfg), "--output", path(out)});
    return run(a);
  };
  ASSERT_EQ(with("c5.json", "a.ddt").code, 0);
  ::setenv("DDUGM_SEED", "5", 1);
  const auto b = with("c9.json", "b.ddt");
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_NE(b.out.find("\"seed\":5"), std::string::npos);
  EXPECT_EQ(read_complex_tensor(path("a.ddt")), read_complex_tensor(path("b.ddt")));
  ::setenv("DDUGM_SEED", "five", 1);
  EXPECT_EQ(with("c9.json", "c.ddt").code, 2);
}

TEST_F(CliTest, BadInvocationsFail) {
  EXPECT_NE(run({}).code, 0);
  EXPECT_NE(run({"frobnicate"}).code, 0);
  EXPECT_NE(run({"mask", "--spec", "cartesian:R=4"}).code, 0);
  const auto spec = run({"mask", "--spec", "spiral:R=4", "-o", path("x.ddt")});
  EXPECT_EQ(spec.code, 2);
  EXPECT_EQ(spec.err.rfind("error: ", 0), 0u) << spec.err;
  EXPECT_EQ(run({"metrics", path("missing.ddt"), path("missing.ddt")}).code, 2);
  ASSERT_EQ(run({"phantom", "--t", "2", "--h", "16", "--w", "16", "-o", path("t.ddt")}).code, 0);
  ASSERT_EQ(run({"mask", "--spec", "cartesian:R=2", "--t", "2", "--h", "16", "--w", "16", "-o", path("m.ddt")}).code, 0);
  const auto no_prior = run({"recon", "--input", path("t_k.ddt"), "--mask", path("m.ddt"), "--score-k", "gaussian",
                             "--output", path("o.ddt")});
  EXPECT_EQ(no_prior.code, 2);
  EXPECT_NE(no_prior.err.find("--prior"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, ServeCheckAgainstAnalyticServer) {
  ddugm::testing::AnalyticServer server(cplx(0.1, 0.2), 0.8);
  const auto ok = run({"serve-check", "--endpoint", server.endpoint(), "--mean-re", "0.1", "--mean-im", "0.2", "--tau",
                       "0.8", "--frames", "5"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("ping ok"), std::string::npos);
  EXPECT_NE(ok.out.find("PASS"), std::string::npos);
  const auto wrong = run({"serve-check", "--endpoint", server.endpoint(), "--tau", "0.8", "--frames", "2"});
  EXPECT_EQ(wrong.code, 1);
  EXPECT_NE(wrong.out.find("FAIL"), std::string::npos);
}
