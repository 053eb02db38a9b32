#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CINEDIFF_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string first_line(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("the command line pipeline runs end to end", "[cli]") {
  const fs::path dir = fresh_dir("cinediff_cli_chain");
  const std::string truth = (dir / "truth.kds").string();
  const std::string y = (dir / "y.kds").string();
  const std::string mask = (dir / "mask.kds").string();
  const std::string train_dir = (dir / "trainset").string();
  const std::string ckpt = (dir / "gm.ckpt").string();
  const std::string recon = (dir / "recon.kds").string();

  REQUIRE(run_cli("generate-phantom --nx 16 --ny 16 --nt 4 --seed 5 --out " + truth) == 0);
  REQUIRE(fs::exists(truth));
  REQUIRE(fs::exists(truth + ".manifest"));

  SECTION("phantom generation is byte-reproducible") {
    const std::string again = (dir / "truth2.kds").string();
    REQUIRE(run_cli("generate-phantom --nx 16 --ny 16 --nt 4 --seed 5 --out " + again) == 0);
    REQUIRE(slurp(truth) == slurp(again));

    const std::string other = (dir / "truth3.kds").string();
    REQUIRE(run_cli("generate-phantom --nx 16 --ny 16 --nt 4 --seed 6 --out " + other) == 0);
    REQUIRE(slurp(truth) != slurp(other));
  }

  SECTION("simulate, train, reconstruct, evaluate, plot") {
    REQUIRE(run_cli("simulate --in " + truth +
                    " --mask-family interleaved-uniform --accel 4 --acs 4 --seed 7 --out-y " + y +
                    " --out-mask " + mask) == 0);
    REQUIRE(fs::exists(y));
    REQUIRE(fs::exists(mask));

    REQUIRE(run_cli("build-trainset --in " + truth +
                    " --scheme global --R 4 --window sliding --acs 4 --seed 3 --out " +
                    train_dir) == 0);
    REQUIRE(fs::exists(fs::path(train_dir) / "sample_0000_0000.kds"));

    REQUIRE(run_cli("train --data " + train_dir +
                    " --role global --steps 6 --batch 2 --lr 1e-3 --sigma-max 20"
                    " --sigma-min 0.01 --levels 6 --seed 1 --loss-csv " +
                    (dir / "loss.csv").string() + " --out " + ckpt) == 0);
    REQUIRE(slurp(ckpt).substr(0, 4) == "GLM1");
    REQUIRE_FALSE(first_line(dir / "loss.csv").empty());

    const std::string recon_flags =
        " --mask " + mask + " --gm " + ckpt +
        " --mode gm --T 4 --J 1 --rank 3 --sigma-max 4 --sigma-min 0.01 --seed 11 --truth " +
        truth;
    REQUIRE(run_cli("reconstruct --y " + y + recon_flags + " --out " + recon + " --report " +
                    (dir / "metrics.csv").string() + " --trace " + (dir / "trace.csv").string() +
                    " --sampler-trace " + (dir / "strace.csv").string()) == 0);
    REQUIRE(fs::exists(recon));
    REQUIRE(fs::exists(recon + ".manifest"));

    REQUIRE(first_line(dir / "metrics.csv") == "series,frame,psnr,ssim,mse_x1e4");
    REQUIRE(slurp(dir / "metrics.csv").find(",avg,") != std::string::npos);
    REQUIRE(first_line(dir / "trace.csv") == "level,sigma,psnr,mse");

    // gm mode never touches the local model, so its trace has no lm rows
    const std::string strace = slurp(dir / "strace.csv");
    REQUIRE(strace.find("gm-predictor") != std::string::npos);
    REQUIRE(strace.find("lm-") == std::string::npos);

    const std::string recon2 = (dir / "recon2.kds").string();
    REQUIRE(run_cli("reconstruct --y " + y + recon_flags + " --out " + recon2) == 0);
    REQUIRE(slurp(recon) == slurp(recon2));

    REQUIRE(run_cli("evaluate --recon " + recon + " --truth " + truth + " --report " +
                    (dir / "eval.csv").string()) == 0);
    REQUIRE(first_line(dir / "eval.csv") == "series,frame,psnr,ssim,mse_x1e4");

    REQUIRE(run_cli("plot-data --trace " + (dir / "trace.csv").string() + " --out " +
                    (dir / "plot.csv").string()) == 0);
    REQUIRE(first_line(dir / "plot.csv") == "iteration,level,sigma,psnr,mse");
  }

  fs::remove_all(dir);
}

TEST_CASE("usage and configuration faults exit with code 2", "[cli]") {
  const fs::path dir = fresh_dir("cinediff_cli_usage");

  REQUIRE(run_cli("generate-phantom --nx 8") == 2);  // --out is required
  REQUIRE(run_cli("no-such-command") == 2);

  const std::string truth = (dir / "truth.kds").string();
  REQUIRE(run_cli("generate-phantom --nx 16 --ny 16 --nt 4 --seed 2 --out " + truth) == 0);

  REQUIRE(run_cli("simulate --in " + truth +
                  " --mask-family bogus --out-y " + (dir / "y.kds").string() + " --out-mask " +
                  (dir / "m.kds").string()) == 2);

  // a merge window longer than the series cannot be assembled
  REQUIRE(run_cli("build-trainset --in " + truth + " --R 32 --out " +
                  (dir / "ts").string()) == 2);

  fs::remove_all(dir);
}

TEST_CASE("unreadable or corrupt data exits with code 3", "[cli]") {
  const fs::path dir = fresh_dir("cinediff_cli_data");

  REQUIRE(run_cli("reconstruct --y " + (dir / "absent.kds").string() + " --mask " +
                  (dir / "absent2.kds").string() + " --gm " + (dir / "absent3.ckpt").string() +
                  " --out " + (dir / "out.kds").string()) == 3);

  const fs::path garbage = dir / "garbage.kds";
  std::ofstream(garbage, std::ios::binary) << "XXXXnot a container";
  REQUIRE(run_cli("evaluate --recon " + garbage.string() + " --truth " + garbage.string() +
                  " --report " + (dir / "r.csv").string()) == 3);

  const fs::path not_trace = dir / "not_trace.csv";
  std::ofstream(not_trace) << "wrong,header\n1,2\n";
  REQUIRE(run_cli("plot-data --trace " + not_trace.string() + " --out " +
                  (dir / "plot.csv").string()) == 3);

  fs::remove_all(dir);
}
