#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bdlle/report_io.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(BDLLE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(testing::TempDir()) / ("cli_" + std::string(testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string p(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SampleDetectEval) {
  ASSERT_EQ(run("sample --name disk --n 800 --seed 2 --out " + p("d.csv")), 0);
  EXPECT_TRUE(fs::exists(p("d.csv.gt.csv")));
  EXPECT_FALSE(fs::exists(p("d.csv.clean.csv")));
  ASSERT_EQ(run("detect --in " + p("d.csv") + " --out " + p("det.json") + " --epsilon 0.3 --reg auto"), 0);
  ASSERT_EQ(run("eval --detected " + p("det.json") + " --gt " + p("d.csv.gt.csv") + " --out " + p("f1.json")), 0);
  const auto f1 = bdlle::io::read_json(p("f1.json"));
  EXPECT_GT(f1["f1_max"].get<double>(), 0.7);

  const auto det = bdlle::io::read_json(p("det.json"));
  EXPECT_EQ(det["n"], 800);
  EXPECT_EQ(det["params"]["scheme"], "ball");
}

TEST_F(Cli, NoisySampleWritesCleanSidecar) {
  ASSERT_EQ(run("sample --name noisy-disk --n 150 --seed 1 --gt-helpers 3000 --out " + p("n.csv")), 0);
  EXPECT_TRUE(fs::exists(p("n.csv.clean.csv")));
  ASSERT_EQ(run("dm --in " + p("n.csv") + " --out " + p("e.csv") + " --epsilon-dm 0.2 --l 3"), 0);
  EXPECT_EQ(bdlle::csv::read_cloud(p("e.csv")).dim(), 3u);
}

TEST_F(Cli, BaselinesAndCpsGrid) {
  ASSERT_EQ(run("sample --name disk --n 500 --seed 3 --out " + p("d.csv")), 0);
  for (const char* algo : {"border", "band", "spinver", "lever"})
    EXPECT_EQ(run(std::string("baseline --algo ") + algo + " --k 30 --in " + p("d.csv") + " --out " + p("b.json")), 0) << algo;
  EXPECT_EQ(run("baseline --algo brim --epsilon 0.3 --in " + p("d.csv") + " --out " + p("b.json")), 0);
  ASSERT_EQ(run("baseline --algo cps --epsilon 0.3 --radius-grid --in " + p("d.csv") + " --out " + p("c.json")), 0);
  ASSERT_EQ(run("eval --detected " + p("c.json") + " --gt " + p("d.csv.gt.csv") + " --out " + p("f.json")), 0);
  EXPECT_EQ(bdlle::io::read_json(p("f.json"))["detector"], "cps");
  EXPECT_EQ(run("baseline --algo cps --radius 0.1 --radius-grid --in " + p("d.csv") + " --out " + p("c.json")), 2);
  EXPECT_EQ(run("baseline --algo border --epsilon 0.3 --in " + p("d.csv") + " --out " + p("c.json")), 2);
}

TEST_F(Cli, PipelineAndReport) {
  ASSERT_EQ(run("pipeline --name noisy-disk --n 400 --gt-helpers 3000 --detector bdlle,border --out " + p("run")), 0);
  EXPECT_TRUE(fs::exists(p("run/table.csv")));
  ASSERT_EQ(run("report --in " + p("run") + " --out " + p("rep")), 0);
  std::ifstream in(p("rep.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "algorithm,noisy-disk");

  std::ofstream(p("cfg.ini")) << "[run]\nschema_version = 1\noutput = " << p("run2") << "\ndetectors = bdlle\n"
                              << "[dataset:disk]\nname = disk\nn = 300\nepsilon = 0.3\n";
  EXPECT_EQ(run("pipeline --config " + p("cfg.ini")), 0);
  EXPECT_TRUE(fs::exists(p("run2/disk/bdlle.json")));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("sample --name sphere --out " + p("x.csv")), 2);
  EXPECT_EQ(run("pipeline --name disk --n 0 --out " + p("z")), 2);
  EXPECT_FALSE(fs::exists(p("z")));
  std::ofstream(p("bad.ini")) << "[run]\nschema_version = 9\n[dataset:a]\nname = disk\n";
  EXPECT_EQ(run("pipeline --config " + p("bad.ini")), 2);
  ASSERT_EQ(run("sample --name disk --n 200 --out " + p("d.csv")), 0);
  EXPECT_EQ(run("detect --in " + p("d.csv") + " --out " + p("x.json") + " --epsilon 0.0001"), 3);
  EXPECT_EQ(run("detect --in " + p("missing.csv") + " --out " + p("x.json")), 3);
  EXPECT_EQ(run("pipeline --name disk --n 200 --no-dm --epsilon 0.0001 --out " + p("f")), 3);
  EXPECT_TRUE(fs::exists(p("f/status.json")));
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(Cli, WorkerCountDoesNotChangeOutput) {
  ASSERT_EQ(run("sample --name disk --n 700 --seed 4 --out " + p("d.csv")), 0);
  const std::string many = std::string("BDLLE_NUM_THREADS=4 ") + BDLLE_CLI_PATH + " detect --in " + p("d.csv") +
                           " --out " + p("four.json") + " --epsilon 0.3 >/dev/null";
  ASSERT_EQ(std::system(("BDLLE_NUM_THREADS=1 " + std::string(BDLLE_CLI_PATH) + " detect --in " + p("d.csv") + " --out " +
                         p("one.json") + " --epsilon 0.3 >/dev/null").c_str()), 0);
  ASSERT_EQ(std::system(many.c_str()), 0);
  std::ifstream a(p("one.json")), b(p("four.json"));
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
}
