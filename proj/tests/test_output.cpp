#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "mheat/cli.hpp"
#include "mheat/error.hpp"
#include "mheat/output.hpp"

using namespace mheat;
namespace fs = std::filesystem;

namespace {

class OutputTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("mheat_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write_config(const std::string& name, const std::string& extra_model) const {
    std::ofstream out(path(name));
    out << "[domain]\nnx = 3\nny = 3\nnz = 3\n[time]\nt_final = 0.25\ntau = 0.0625\n[model]\n" << extra_model
        << "[study]\ntrials = 5\ntau_list = 0.0625, 0.03125, 0.015625\n";
    return path(name);
  }

  fs::path dir_;
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
  return out;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(MHEAT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_F(OutputTest, EmptyDiagnosticsIsHeaderOnly) {
  write_diagnostics_csv(path("d.csv"), {});
  const auto ls = lines(slurp(path("d.csv")));
  ASSERT_EQ(ls.size(), 1u);
  EXPECT_EQ(split(ls[0]), diagnostics_columns());
  EXPECT_EQ(diagnostics_columns().front(), "step");
}

TEST_F(OutputTest, CsvEvery) {
  std::vector<StepDiagnostics> rows(6);
  for (int i = 0; i < 6; ++i) {
    rows[i].step = i + 1;
    rows[i].norm_B_L2 = 0.1 * (i + 1);
  }
  write_diagnostics_csv(path("d.csv"), rows, 2);
  const auto ls = lines(slurp(path("d.csv")));
  ASSERT_EQ(ls.size(), 4u);
  EXPECT_EQ(split(ls[1])[0], "2");
  EXPECT_EQ(split(ls[3])[0], "6");
  EXPECT_THROW(write_diagnostics_csv(path("e.csv"), rows, 0), Error);
}

TEST_F(OutputTest, FormatDoubleRoundTrips) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-300.0, 300.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::pow(10.0, u(rng)) * (i % 2 ? -1.0 : 1.0);
    ASSERT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_double(0.0), "0");
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST_F(OutputTest, SnapshotRoundTripIsBitwise) {
  const auto g = build_grid({1, 2, 1}, {2, 3, 2}, {BoxFace::ZMinus});
  std::mt19937_64 rng(32);
  std::normal_distribution<double> n(0.0, 1.0);
  EdgeField B(g.edge_count());
  NodeField xi(g.node_count());
  for (double& b : B) b = n(rng) * 1e-3;
  for (double& x : xi) x = n(rng) * 1e5;
  B[0] = 0.0;
  B[1] = -0.0;
  xi[0] = std::numeric_limits<double>::min();
  xi[1] = 1.0 / 3.0;
  write_snapshot(path("s.txt"), g, B, xi, 0.375);
  const SnapshotFile s = read_snapshot(path("s.txt"));
  EXPECT_EQ(s.cells, g.cells());
  EXPECT_EQ(s.spacing, g.spacing());
  EXPECT_EQ(s.t, 0.375);
  ASSERT_EQ(s.B.size(), B.size());
  ASSERT_EQ(s.xi.size(), static_cast<std::size_t>(g.node_count()));
  for (std::size_t i = 0; i < B.size(); ++i) ASSERT_EQ(s.B[i], B[i]) << i;
  for (std::size_t i = 0; i < xi.size(); ++i) ASSERT_EQ(s.xi[i], xi[i]) << i;
  EXPECT_EQ(slurp(path("s.txt")).rfind("# mheat snapshot\n", 0), 0u);

  write_snapshot(path("z.txt"), g, EdgeField(g.edge_count(), 0.0), NodeField(g.node_count(), 0.0), 0.0);
  for (double v : read_snapshot(path("z.txt")).B) EXPECT_EQ(v, 0.0);
}

TEST_F(OutputTest, SnapshotRejectsDamage) {
  const auto g = build_grid({1, 1, 1}, {2, 2, 2}, {BoxFace::ZMinus});
  write_snapshot(path("s.txt"), g, EdgeField(g.edge_count(), 1.0), NodeField(g.node_count(), 2.0), 0.5);
  std::string text = slurp(path("s.txt"));
  std::ofstream(path("cut.txt")) << text.substr(0, text.size() - 20);
  EXPECT_THROW(read_snapshot(path("cut.txt")), Error);
  std::ofstream(path("head.txt")) << "# other\n" << text;
  EXPECT_THROW(read_snapshot(path("head.txt")), Error);
  EXPECT_THROW(write_snapshot(path("bad.txt"), g, EdgeField(3, 0.0), NodeField(g.node_count(), 0.0), 0.0), Error);
}

TEST_F(OutputTest, IoErrorsNameThePath) {
  const std::string bad = path("missing_dir/sub/d.csv");
  try {
    write_diagnostics_csv(bad, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
    EXPECT_NE(std::string(e.what()).find(bad), std::string::npos);
  }
  try {
    read_snapshot(path("nope.txt"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(path("nope.txt")), std::string::npos);
  }
}

TEST_F(OutputTest, ExitCodes) {
  EXPECT_EQ(exit_code_for(ErrorKind::Config), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::Grid), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::Solver), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::Precondition), 4);
  EXPECT_EQ(exit_code_for(ErrorKind::Io), 1);
}

TEST_F(OutputTest, CliRunWithZeroData) {
  const std::string cfg = write_config("zero.cfg", "B0_preset = zero\n");
  ASSERT_EQ(cli("run --config " + cfg + " --out " + path("out")), 0);
  const auto ls = lines(slurp(path("out/diagnostics.csv")));
  ASSERT_EQ(ls.size(), 5u);
  const auto header = split(ls[0]);
  for (std::size_t r = 1; r < ls.size(); ++r) {
    const auto cells = split(ls[r]);
    ASSERT_EQ(cells.size(), header.size());
    EXPECT_EQ(cells[0], std::to_string(r));
    for (std::size_t c = 2; c < cells.size(); ++c) {
      if (header[c].find("iters") == std::string::npos) EXPECT_EQ(std::stod(cells[c]), 0.0) << header[c];
    }
  }
}

TEST_F(OutputTest, CliRejectsBadInvocations) {
  const std::string cfg = write_config("ok.cfg", "");
  EXPECT_NE(cli("run --config " + cfg + " --bogus"), 0);
  EXPECT_NE(cli("frobnicate --config " + cfg), 0);
  EXPECT_EQ(cli("run"), 2);
  EXPECT_NE(cli(""), 0);
  EXPECT_EQ(cli("run --config " + path("absent.cfg") + " --out " + path("o1")), 2);
  const std::string bad = write_config("bad.cfg", "lambda0 = 0\n");
  EXPECT_EQ(cli("run --config " + bad + " --out " + path("o2")), 2);
  EXPECT_FALSE(fs::exists(path("o2")));
}

TEST_F(OutputTest, CliVerifyIsDeterministic) {
  const std::string cfg = write_config("v.cfg", "");
  ASSERT_EQ(cli("verify --config " + cfg + " --seed 3 --out " + path("a")), 0);
  ASSERT_EQ(cli("verify --config " + cfg + " --seed 3 --out " + path("b")), 0);
  const std::string a = slurp(path("a/certification.txt"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(path("b/certification.txt")));
  for (Lemma l : all_lemmas()) EXPECT_NE(a.find(to_string(l)), std::string::npos);
}

TEST_F(OutputTest, CliStudiesWriteTables) {
  const std::string cfg = write_config("s.cfg", "");
  ASSERT_EQ(cli("converge-tau --config " + cfg + " --out " + path("t")), 0);
  const auto ls = lines(slurp(path("t/tau_convergence.csv")));
  ASSERT_EQ(ls.size(), 4u);
  EXPECT_EQ(ls[0], "tau,diff_B,diff_xi,order_B,order_xi,interp_gap_B");
}
