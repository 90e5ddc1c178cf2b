#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(PLCMINE_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("plcmine_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("pipeline artifacts are byte-identical across runs") {
  const auto a = scratch("a"), b = scratch("b");
  REQUIRE(cli("pipeline --scenario scenario2 --out-dir " + a.string()) == 0);
  REQUIRE(cli("pipeline --scenario scenario2 --out-dir " + b.string()) == 0);
  for (const char* f : {"io_log.csv", "trajectory.csv", "event_log.json", "net.json", "dfg.dot",
                        "model.json", "report.json", "trajectory.svg"}) {
    INFO(f);
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("stage commands chain and validation passes") {
  const auto d = scratch("stages");
  const auto out = " --scenario scenario1 --out-dir " + d.string();
  REQUIRE(cli("record" + out) == 0);
  REQUIRE(cli("convert" + out) == 0);
  REQUIRE(cli("discover" + out) == 0);
  CHECK(cli("validate" + out) == 0);
  CHECK(fs::exists(d / "validation.json"));
  CHECK(fs::exists(d / "validation.svg"));
  CHECK(cli("substitute --strict" + out) == 0);
}

TEST_CASE("zero duration records a header-only IO log") {
  const auto d = scratch("empty");
  REQUIRE(cli("record --scenario scenario1 --duration 0 --out-dir " + d.string()) == 0);
  CHECK(slurp(d / "io_log.csv") == "tick,address,value,class\n");
  CHECK(cli("convert --scenario scenario1 --out-dir " + d.string()) == 1);
}

TEST_CASE("errors exit with 1") {
  CHECK(cli("record --scenario scenario9") == 1);
  CHECK(cli("discover --out-dir " + scratch("missing").string()) == 1);
  CHECK(cli("frobnicate") == 1);
}

TEST_CASE("different seeds give different noisy recordings") {
  const auto a = scratch("s1"), b = scratch("s2");
  REQUIRE(cli("record --scenario scenario3 --duration 60 --seed 1 --out-dir " + a.string()) == 0);
  REQUIRE(cli("record --scenario scenario3 --duration 60 --seed 2 --out-dir " + b.string()) == 0);
  const auto x = slurp(a / "io_log.csv"), y = slurp(b / "io_log.csv");
  CHECK(x != y);
  CHECK(x.substr(0, x.find('\n')) == y.substr(0, y.find('\n')));
}
