#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kCli = AMSHD_CLI_PATH;
const std::string kDataset = std::string(AMSHD_SOURCE_DIR) + "/data/synthetic_sample.csv";

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("mi: ranks features and reproduces byte-identically") {
  const auto out1 = fresh_dir("amshd_cli_mi1");
  const auto out2 = fresh_dir("amshd_cli_mi2");
  REQUIRE(run("mi --dataset " + kDataset + " --out " + out1.string()) == 0);
  REQUIRE(run("mi --dataset " + kDataset + " --out " + out2.string()) == 0);

  const std::string csv = slurp(out1 / "mi_scores.csv");
  CHECK(csv.rfind("feature,score", 0) == 0);
  // SpO2 drives the synthetic labels; it must come out on top
  CHECK(csv.find("\nSpO2,") == csv.find('\n'));
  CHECK(fs::exists(out1 / "mi_report.md"));
  CHECK(slurp(out1 / "mi_scores.csv") == slurp(out2 / "mi_scores.csv"));

  // manifests agree up to the output paths themselves
  auto strip_paths = [](const std::string& text) {
    std::istringstream in(text);
    std::string line, kept;
    while (std::getline(in, line)) {
      if (line.rfind("out=", 0) == 0 || line.rfind("model=", 0) == 0) continue;
      kept += line + "\n";
    }
    return kept;
  };
  CHECK(strip_paths(slurp(out1 / "manifest.txt")) == strip_paths(slurp(out2 / "manifest.txt")));
}

TEST_CASE("train then eval: works end to end and reproduces") {
  const auto out = fresh_dir("amshd_cli_tr");
  const std::string common =
      " --dataset " + kDataset + " --out " + out.string() + " --dim 512 --seed 7";
  REQUIRE(run("train" + common) == 0);
  CHECK(fs::exists(out / "model.amshd"));

  REQUIRE(run("eval" + common) == 0);
  CHECK(fs::exists(out / "metrics.csv"));
  CHECK(fs::exists(out / "confusion.csv"));
  CHECK(fs::exists(out / "per_subject.csv"));

  const std::string metrics1 = slurp(out / "metrics.csv");
  REQUIRE(run("eval" + common) == 0);
  CHECK(slurp(out / "metrics.csv") == metrics1);

  // regenerate from the manifest alone
  const auto out2 = fresh_dir("amshd_cli_tr2");
  const auto manifest = out / "manifest.txt";
  REQUIRE(run("eval --config " + manifest.string() + " --out " + out2.string() + " --model " +
              (out / "model.amshd").string()) == 0);
  CHECK(slurp(out2 / "metrics.csv") == metrics1);
  CHECK(slurp(out2 / "confusion.csv") == slurp(out / "confusion.csv"));
  CHECK(slurp(out2 / "per_subject.csv") == slurp(out / "per_subject.csv"));
}

TEST_CASE("eval: scheme mismatch errors") {
  const auto out = fresh_dir("amshd_cli_mismatch");
  const std::string common = " --dataset " + kDataset + " --out " + out.string() + " --dim 128";
  REQUIRE(run("train" + common + " --scheme binary") == 0);
  CHECK(run("eval" + common + " --scheme multiclass") == 4);
}

TEST_CASE("bench: sweeps the grid, dedupes, and flags errors without dying") {
  const auto out = fresh_dir("amshd_cli_bench");
  REQUIRE(run("bench --dataset " + kDataset + " --out " + out.string() +
              " --bench-dims 64,128,64 --bench-sources sobol,hadamard") == 0);
  const std::string csv = slurp(out / "bench_results.csv");
  // 2 sources x 2 distinct dims + header
  int lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 5);
  CHECK(csv.find("error") == std::string::npos);
  CHECK(fs::exists(out / "bench_timing.csv"));
  CHECK(fs::exists(out / "bench_results.md"));
}

TEST_CASE("orthohist: histogram files with summary line") {
  const auto out = fresh_dir("amshd_cli_ortho");
  REQUIRE(run("orthohist --out " + out.string() +
              " --orthohist-dims 256 --orthohist-m 30 --source sobol") == 0);
  const std::string pos = slurp(out / "orthohist_positions_D256.csv");
  CHECK(pos.find("# mean=") != std::string::npos);
  const std::string feat = slurp(out / "orthohist_features_D256.csv");
  CHECK(feat.rfind("bin_lo,bin_hi,mass", 0) == 0);
}

TEST_CASE("exit codes: usage, schema, computation") {
  CHECK(run("") == 2);                       // no subcommand
  CHECK(run("mi") == 2);                     // no dataset
  CHECK(run("mi --no-such-flag x") == 2);    // unknown flag
  CHECK(run("frobnicate") == 2);             // unknown subcommand

  const auto out = fresh_dir("amshd_cli_schema");
  CHECK(run("mi --dataset /no/such/file.csv --out " + out.string()) == 3);

  const fs::path bad = out / "bad.csv";
  std::ofstream(bad) << "Subject,Event,Time\nS1,Baseline,1\n";  // missing columns
  CHECK(run("mi --dataset " + bad.string() + " --out " + out.string()) == 3);

  // eval without a trained model: computation error
  CHECK(run("eval --dataset " + kDataset + " --out " + out.string()) == 4);
}

TEST_CASE("config file precedence: flags beat config keys") {
  const auto out = fresh_dir("amshd_cli_cfg");
  const fs::path cfg = out / "run.cfg";
  std::ofstream(cfg) << "dataset=" << kDataset << "\ndim=64\nseed=5\n";
  REQUIRE(run("train --config " + cfg.string() + " --out " + out.string() + " --dim 128") == 0);
  const std::string manifest = slurp(out / "manifest.txt");
  CHECK(manifest.find("dim=128") != std::string::npos);
  CHECK(manifest.find("seed=5") != std::string::npos);
}

}  // TEST_SUITE
