#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  std::string cmd = std::string(OVERT_BIN) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

const std::string kData = DATA_DIR;
const std::string kPd = kData + "/controllers/pendulum_pd_8x8.json";

}  // namespace

TEST_CASE("reach subcommand writes the documented schema and exits 0 on holds") {
  std::string out = "/tmp/overt_cli_sets.json";
  int rc = run("reach --benchmark pendulum --controller " + kPd +
               " --horizon 10 --schedule 5,5 --seed 1 --out " + out);
  CHECK(rc == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(out));
  REQUIRE(j.contains("timesteps"));
  REQUIRE(j["timesteps"].size() == 10);
  CHECK(j["timesteps"][0]["t"] == 1);
  CHECK(j["timesteps"][0]["kind"] == "concrete");
  CHECK(j["timesteps"][4]["kind"] == "symbolic");
  CHECK(j["timesteps"][0]["box"].size() == 2);
  CHECK(j["verdict"]["status"] == "holds");
  CHECK(j.contains("counterexample"));
  CHECK(j["timing"].contains("lp_solves"));
  CHECK(j["timing"].contains("bb_nodes"));
}

TEST_CASE("identical config and seed give byte-identical outputs") {
  std::string a = "/tmp/overt_cli_a.json", b = "/tmp/overt_cli_b.json";
  std::string args = "reach --benchmark pendulum --controller " + kPd +
                     " --horizon 6 --schedule 3,3 --seed 7 --out ";
  REQUIRE(run(args + a) == 0);
  REQUIRE(run(args + b) == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("feas and hsfeas subcommands") {
  CHECK(run("feas --benchmark pendulum --controller " + kPd + " --horizon 8") == 0);
  CHECK(run("hsfeas --benchmark pendulum --controller " + kPd +
            " --horizon 8 --reset never") == 0);
  CHECK(run("hsfeas --benchmark pendulum --controller " + kPd +
            " --horizon 8 --reset interval --reset-interval 4") == 0);
}

TEST_CASE("car benchmark adjudicates never-reaches-goal with exit 1") {
  std::string out = "/tmp/overt_cli_car.json";
  int rc = run("reach --benchmark car --controller " + kData +
               "/controllers/car_4x8x8x2.json --horizon 4 --schedule 2,2 --out " + out);
  CHECK(rc == 1);
  nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(j["verdict"]["status"] == "fails");
}

TEST_CASE("approx subcommand emits breakpoints and closed forms") {
  std::string out = "/tmp/overt_cli_bound.json";
  REQUIRE(run("approx --expr \"sin(x)\" --domain=-1.571,1.571 --n 2 --epsilon 0 --out " + out) ==
          0);
  nlohmann::json j = nlohmann::json::parse(slurp(out));
  REQUIRE(j.contains("upper"));
  CHECK(j["upper"]["breakpoints"].size() == 5);
  std::string cf = j["upper"]["closed_form"].get<std::string>();
  CHECK(cf.find("max(") != std::string::npos);
  // General expressions route through the full abstraction pipeline.
  REQUIRE(run("approx --expr \"x*sin(y)\" --domain x:1:2,y:0.5:1.5 --out " + out) == 0);
  nlohmann::json g = nlohmann::json::parse(slurp(out));
  CHECK(g.contains("constraints"));
  CHECK(g.contains("domains"));
}

TEST_CASE("simulate subcommand") {
  std::string out = "/tmp/overt_cli_sim.json";
  REQUIRE(run("simulate --benchmark pendulum --controller " + kPd +
              " --horizon 5 --samples 200 --seed 3 --out " + out) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(j["hulls"].size() == 6);
  CHECK(j["samples"] == 200);
}

TEST_CASE("usage and file errors exit 3") {
  CHECK(run("reach --benchmark pendulum") == 3);                        // missing controller
  CHECK(run("reach --benchmark nope --controller " + kPd + " --horizon 3") == 3);
  CHECK(run("reach --system /does/not/exist.json --horizon 3") == 3);
  CHECK(run("feas --benchmark pendulum --controller /missing.json --horizon 3") == 3);
  CHECK(run("approx --expr \"sin(\" --domain 0,1") == 3);
}

TEST_CASE("config file supplies defaults, flags win") {
  std::string cfg = "/tmp/overt_cli_cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"benchmark":"pendulum","controller":")" << kPd
        << R"(","horizon":6,"schedule":[3,3],"seed":9})";
  }
  std::string o1 = "/tmp/overt_cli_c1.json";
  REQUIRE(run("reach --config " + cfg + " --out " + o1) == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(o1));
  CHECK(j["timesteps"].size() == 6);
  // Flag overrides the config horizon.
  std::string o2 = "/tmp/overt_cli_c2.json";
  REQUIRE(run("reach --config " + cfg + " --horizon 4 --schedule 2,2 --out " + o2) == 0);
  nlohmann::json j2 = nlohmann::json::parse(slurp(o2));
  CHECK(j2["timesteps"].size() == 4);
}

TEST_CASE("unknown OVERT_SOLVER backend is a usage error") {
  std::string cmd = "OVERT_SOLVER=bogus " + std::string(OVERT_BIN) +
                    " feas --benchmark pendulum --controller " + kPd +
                    " --horizon 2 >/dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 3);
}

TEST_CASE("shipped query configs run as-is") {
  CHECK(run("reach --config " + kData + "/queries/pendulum_reach.json --out /tmp/overt_q1.json") == 0);
  CHECK(run("reach --config " + kData + "/queries/tora_reach.json --out /tmp/overt_q2.json") == 0);
}

TEST_CASE("custom system with property file via --system") {
  std::string prop = "/tmp/overt_cli_prop.json";
  {
    std::ofstream out(prop);
    out << R"({"modality":"G","from":1,"to":4,
               "atoms":[{"coeffs":{"x1":1.0},"rel":">=","rhs":-0.2167}]})";
  }
  std::string out = "/tmp/overt_cli_sys.json";
  int rc = run("reach --system " + kData + "/systems/pendulum.json --controller " + kPd +
               " --initial \"1,1.2;0,0.2\" --property " + prop +
               " --horizon 4 --schedule 2,2 --out " + out);
  CHECK(rc == 0);
  nlohmann::json j = nlohmann::json::parse(slurp(out));
  CHECK(j["verdict"]["status"] == "holds");
  CHECK(j["timesteps"].size() == 4);
}
