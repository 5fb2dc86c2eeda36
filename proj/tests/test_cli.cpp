// Drives the qcredit executable end to end.

#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#ifndef QCREDIT_CLI
#error "QCREDIT_CLI must name the command-line executable"
#endif

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / ("qcredit_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string &args) {
  const std::string cmd = std::string("\"") + QCREDIT_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string &s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_CASE("gen-data") {
  const auto dir = scratch("gen");
  const auto a = dir / "a.csv";
  const auto b = dir / "b.csv";
  CHECK(run("gen-data --out " + a.string() + " --seed 4") == 0);
  CHECK(run("gen-data --out " + b.string() + " --seed 4") == 0);
  CHECK(line_count(slurp(a)) == 280);
  CHECK(slurp(a) == slurp(b));
  CHECK(run("gen-data") == 2);
  CHECK(run("gen-data --out " + (dir / "missing" / "x" / "y.csv").string()) == 2);
  CHECK(run("bogus") == 2);
  CHECK(run("gen-data --help") == 0);
}

TEST_CASE("train") {
  const auto dir = scratch("train");
  const auto data = dir / "data.csv";
  REQUIRE(run("gen-data --out " + data.string()) == 0);
  const std::string before = slurp(data);

  const auto out = dir / "out";
  CHECK(run("train --data " + data.string() + " --partition 8 --out " + out.string()) == 0);
  const auto trace = nlohmann::json::parse(slurp(out / "partition_08_trace.json"));
  CHECK(trace.size() == 50);
  CHECK(trace[0].contains("params"));
  CHECK(trace[0]["params"].size() == 14);
  CHECK(line_count(slurp(out / "partition_08.csv")) == 2);
  CHECK(slurp(data) == before);

  CHECK(run("train --data " + data.string() + " --partition 11 --out " + out.string()) == 4);
  CHECK(run("train --data " + data.string() + " --partition 0 --out " + out.string()) == 4);
  CHECK(run("train --data " + data.string() + " --partition 1 --lr -1 --out " + out.string()) == 4);

  std::string broken = before;
  const auto third_line = broken.find('\n', broken.find('\n') + 1) + 1;
  broken.insert(third_line, "1,2,3\n");
  const auto bad = dir / "bad.csv";
  std::ofstream(bad) << broken;
  CHECK(run("train --data " + bad.string() + " --partition 1 --out " + out.string()) == 3);
  const std::string msg_cmd = std::string("\"") + QCREDIT_CLI + "\" train --data " + bad.string() +
                              " --partition 1 --out " + out.string() + " 2>&1 | grep -q 'line 3'";
  CHECK(std::system(msg_cmd.c_str()) == 0);

  const auto cfg = dir / "cfg.json";
  std::ofstream(cfg) << "{\"epochs\": ";
  CHECK(run("train --data " + data.string() + " --partition 1 --config " + cfg.string() + " --out " + out.string()) ==
        3);
  std::ofstream(cfg) << R"({"epochs": 2, "seed": 3})";
  CHECK(run("train --data " + data.string() + " --partition 2 --config " + cfg.string() + " --epochs 4 --out " +
            out.string()) == 0);
  CHECK(nlohmann::json::parse(slurp(out / "partition_02_trace.json")).size() == 4);

  CHECK(run("train --data " + (dir / "nope.csv").string() + " --partition 1") == 2);
}

TEST_CASE("train honours the output-directory environment variable") {
  const auto dir = scratch("env");
  const auto data = dir / "data.csv";
  REQUIRE(run("gen-data --out " + data.string()) == 0);
  const auto out = dir / "from_env";
  const std::string cmd = "QCREDIT_OUT_DIR=" + out.string() + " \"" + QCREDIT_CLI + "\" train --data " +
                          data.string() + " --partition 3 --epochs 2 >/dev/null 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(out / "partition_03_trace.json"));
}

TEST_CASE("crossval writes twelve files, identical across job counts") {
  const auto dir = scratch("cv");
  const auto data = dir / "data.csv";
  REQUIRE(run("gen-data --out " + data.string()) == 0);
  const auto one = dir / "one";
  const auto three = dir / "three";
  CHECK(run("crossval --data " + data.string() + " --epochs 3 --out " + one.string()) == 0);
  CHECK(run("crossval --data " + data.string() + " --epochs 3 --jobs 3 --out " + three.string()) == 0);
  std::size_t files = 0;
  for (const auto &entry : fs::directory_iterator(one)) {
    ++files;
    CHECK(slurp(entry.path()) == slurp(three / entry.path().filename()));
  }
  CHECK(files == 12);
  const auto agg = nlohmann::json::parse(slurp(one / "aggregate.json"));
  for (const char *metric : {"auc", "ks", "recall", "precision"}) {
    CHECK(agg[metric].contains("mean"));
    CHECK(agg[metric].contains("std"));
  }
  CHECK(line_count(slurp(one / "benchmark.csv")) == 6);
  CHECK(run("crossval --data " + data.string() + " --jobs 0 --out " + one.string()) == 4);
}
