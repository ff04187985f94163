#include <doctest.h>
#include <gelnet/evaluation.hpp>
#include <gelnet/matrix.hpp>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace gelnet;
namespace fs = std::filesystem;

namespace {

struct Sandbox {
  fs::path dir;
  Sandbox() {
    dir = fs::temp_directory_path() / ("gelnet_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

// Runs the CLI with `args`; stdout goes to `stdout_file` when given.
int run_cli(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = std::string("\"") + GELNET_CLI_PATH + "\" " + args;
  cmd += stdout_file.empty() ? " > /dev/null" : " > \"" + stdout_file + "\"";
  cmd += " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::string& path) { return nlohmann::json::parse(slurp(path)); }

Matrix test_covariance() {
  Matrix s(3, 3);
  s << 2.0, 0.6, 0.2, 0.6, 1.5, 0.3, 0.2, 0.3, 1.0;
  return s;
}

}  // namespace

TEST_CASE("estimate at lambda 0 inverts S") {
  Sandbox box;
  write_csv(box.path("s.csv"), test_covariance());
  const int code = run_cli("estimate --s " + box.path("s.csv") +
                           " --lambda 0 --alpha 1 --outer-thr 1e-12 --inner-thr 1e-14 --outer-maxit 10000 "
                           "--out-prefix " + box.path("fit"));
  CHECK(code == 0);
  const Matrix theta = read_csv(box.path("fit.theta.csv"));
  CHECK((theta - test_covariance().inverse()).cwiseAbs().maxCoeff() <= 1e-6);
  const auto meta = read_json(box.path("fit.meta.json"));
  CHECK(meta["schema"] == 1);
  CHECK(meta["conv"] == true);
  CHECK(meta["solver"] == "gelnet");
  for (const char* key : {"lambda", "alpha", "niter", "del", "n_components", "max_block_size", "wall_ms"})
    CHECK(meta.contains(key));
}

TEST_CASE("written theta round-trips bit for bit") {
  Sandbox box;
  write_csv(box.path("s.csv"), test_covariance());
  REQUIRE(run_cli("estimate --s " + box.path("s.csv") + " --lambda 0.1 --alpha 0.5 --out-prefix " +
                  box.path("fit")) == 0);
  const std::string text = slurp(box.path("fit.theta.csv"));
  CHECK(format_csv(read_csv(box.path("fit.theta.csv"))) == text);
}

TEST_CASE("auto solver picks rope at alpha 0 and gelnet otherwise") {
  Sandbox box;
  write_csv(box.path("s.csv"), test_covariance());
  REQUIRE(run_cli("estimate --s " + box.path("s.csv") + " --lambda 0.2 --alpha 0 --out-prefix " +
                  box.path("a")) == 0);
  CHECK(read_json(box.path("a.meta.json"))["solver"] == "rope");
  REQUIRE(run_cli("estimate --s " + box.path("s.csv") + " --lambda 0.2 --alpha 0.3 --out-prefix " +
                  box.path("b")) == 0);
  CHECK(read_json(box.path("b.meta.json"))["solver"] == "gelnet");
}

TEST_CASE("budget exhaustion exits 2 and still writes outputs") {
  Sandbox box;
  const auto truth = gen_model({5, 12, 3});
  write_csv(box.path("s.csv"), sample_covariance(sample_gaussian(truth.sigma, 30, 4)).mat());
  const int code = run_cli("estimate --s " + box.path("s.csv") +
                           " --lambda 0.05 --alpha 0.5 --outer-maxit 1 --no-screening --out-prefix " +
                           box.path("fit"));
  CHECK(code == 2);
  CHECK(fs::exists(box.path("fit.theta.csv")));
  CHECK(read_json(box.path("fit.meta.json"))["conv"] == false);
}

TEST_CASE("usage and input errors exit 1") {
  Sandbox box;
  write_csv(box.path("s.csv"), test_covariance());
  const std::string s = " --s " + box.path("s.csv") + " --out-prefix " + box.path("x");
  CHECK(run_cli("estimate" + s + " --lambda 0.1 --solver dpgelnet --target identity") == 1);
  CHECK(run_cli("estimate" + s + " --lambda 0.1 --alpha 0.5 --solver rope") == 1);
  CHECK(run_cli("estimate" + s + " --lambda -1") == 1);
  CHECK(run_cli("estimate" + s) == 1);
  CHECK(run_cli("estimate --lambda 0.1 --out-prefix " + box.path("x")) == 1);
  CHECK(run_cli("estimate --s " + box.path("missing.csv") + " --lambda 0.1") == 1);
  CHECK(run_cli("frobnicate") == 1);
  CHECK(run_cli("") == 1);
}

TEST_CASE("zero constraints and custom targets are honoured") {
  Sandbox box;
  write_csv(box.path("s.csv"), test_covariance());
  std::ofstream(box.path("zero.csv")) << "0,1\n";
  std::ofstream(box.path("t.csv")) << "0.5\n0.5\n0.5\n";
  REQUIRE(run_cli("estimate --s " + box.path("s.csv") + " --lambda 0.1 --alpha 0.5 --zero " +
                  box.path("zero.csv") + " --target file:" + box.path("t.csv") + " --out-prefix " +
                  box.path("fit")) == 0);
  const Matrix theta = read_csv(box.path("fit.theta.csv"));
  CHECK(theta(0, 1) == 0.0);
  CHECK(theta(1, 0) == 0.0);
  CHECK(read_json(box.path("fit.meta.json"))["target"] == "custom");
}

TEST_CASE("warm start files are accepted") {
  Sandbox box;
  write_csv(box.path("s.csv"), test_covariance());
  const std::string base = "estimate --s " + box.path("s.csv") + " --alpha 1 --solver dpgelnet ";
  REQUIRE(run_cli(base + "--lambda 0.2 --out-prefix " + box.path("a")) == 0);
  CHECK(run_cli(base + "--lambda 0.1 --warm-theta " + box.path("a.theta.csv") + " --warm-w " +
                box.path("a.w.csv") + " --out-prefix " + box.path("b")) == 0);
  CHECK(run_cli(base + "--lambda 0.1 --warm-theta " + box.path("a.theta.csv") + " --out-prefix " +
                box.path("c")) == 1);
}

TEST_CASE("estimate from data with a nodewise target") {
  Sandbox box;
  const auto truth = gen_model({5, 6, 8});
  write_csv(box.path("x.csv"), sample_gaussian(truth.sigma, 60, 9));
  CHECK(run_cli("estimate --data " + box.path("x.csv") + " --cor --lambda 0.1 --alpha 0.5 --target nodewise " +
                "--out-prefix " + box.path("fit")) == 0);
  CHECK(read_json(box.path("fit.meta.json"))["target"] == "nodewise");
}

TEST_CASE("identical command lines give byte-identical files") {
  Sandbox box;
  const auto truth = gen_model({5, 8, 11});
  write_csv(box.path("x.csv"), sample_gaussian(truth.sigma, 50, 12));
  for (const char* run : {"a", "b"}) {
    REQUIRE(run_cli("estimate --data " + box.path("x.csv") + " --cor --lambda 0.1 --alpha 0.5 --no-timing " +
                    "--out-prefix " + box.path(std::string("e") + run)) == 0);
    REQUIRE(run_cli("cv --data " + box.path("x.csv") + " --cor --grid geo:0.8,6 --alpha 0.5 --seed 3 " +
                    "--no-timing --out-prefix " + box.path(std::string("c") + run)) == 0);
  }
  for (const char* ext : {".theta.csv", ".w.csv", ".meta.json"}) {
    CHECK(slurp(box.path(std::string("ea") + ext)) == slurp(box.path(std::string("eb") + ext)));
    CHECK(slurp(box.path(std::string("ca") + ext)) == slurp(box.path(std::string("cb") + ext)));
  }
  CHECK(slurp(box.path("ca.scores.csv")) == slurp(box.path("cb.scores.csv")));
}

TEST_CASE("cv writes the score table and lambda_opt") {
  Sandbox box;
  const auto truth = gen_model({5, 8, 21});
  write_csv(box.path("x.csv"), sample_gaussian(truth.sigma, 60, 22));
  REQUIRE(run_cli("cv --data " + box.path("x.csv") + " --cor --grid 0.5,0.2,0.1,0.05 --alpha 0.5 " +
                  "--target identity --folds 4 --out-prefix " + box.path("cv"),
                  box.path("stdout.txt")) == 0);
  std::istringstream scores(slurp(box.path("cv.scores.csv")));
  std::string line;
  std::getline(scores, line);
  CHECK(line == "lambda,mean_score,n_valid,fold1,fold2,fold3,fold4");
  int rows = 0;
  while (std::getline(scores, line)) ++rows;
  CHECK(rows == 4);
  const auto meta = read_json(box.path("cv.meta.json"));
  CHECK(slurp(box.path("stdout.txt")).rfind("lambda_opt,", 0) == 0);
  const double lambda_opt = meta["lambda_opt"];
  CHECK((lambda_opt == 0.5 || lambda_opt == 0.2 || lambda_opt == 0.1 || lambda_opt == 0.05));
}

TEST_CASE("simulate emits one row per replicate and method") {
  Sandbox box;
  REQUIRE(run_cli("simulate --model 5 --p 10 --n 40 --reps 2 --methods gelnet:1,gelnet:0.5,rope "
                  "--grid geo:0.7,6 --folds 3 --seed 7 --out " + box.path("sim.csv")) == 0);
  std::istringstream csv(slurp(box.path("sim.csv")));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "model,p,n,method,lambda,alpha,target,KL,L2,SP,F1,MCC");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 6);
  REQUIRE(run_cli("simulate --model 5 --p 10 --n 40 --reps 2 --methods gelnet:1,gelnet:0.5,rope "
                  "--grid geo:0.7,6 --folds 3 --seed 7 --threads 2 --out " + box.path("sim2.csv")) == 0);
  CHECK(slurp(box.path("sim.csv")) == slurp(box.path("sim2.csv")));
}

TEST_CASE("bench reports screened and unscreened timings") {
  Sandbox box;
  REQUIRE(run_cli("bench --scenario blocks --blocks 3 --block-size 6 --lambda 0.3 --repeats 1",
                  box.path("bench.csv")) == 0);
  std::istringstream csv(slurp(box.path("bench.csv")));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "method,scenario,variant,repeats,mean_ms");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    CHECK(line.find(",blocks,") != std::string::npos);
  }
  CHECK(rows == 4);
  CHECK(run_cli("bench --scenario nonsense --repeats 1") == 1);
}
