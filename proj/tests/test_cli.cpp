#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

fs::path scratch() {
  fs::path dir = fs::temp_directory_path() / "momopt_cli_test";
  fs::create_directories(dir);
  return dir;
}

Run run(const std::string& args) {
  fs::path out = scratch() / "stdout.txt";
  std::string cmd = std::string(MOMOPT_CLI_PATH) + " " + args + " > " + out.string() + " 2> /dev/null";
  int raw = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("finite-min on x^2 succeeds") {
    Run r = run("finite-min --vars x --objective 'x^2'");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "Exact");
    CHECK(std::abs(j["f_star"].get<double>()) <= 1e-6);
    CHECK(j["minimizers"].size() == 1);
  }

  TEST_CASE("minimize reports the relaxation value") {
    Run r = run("minimize --vars x --objective 'x^2 - 2*x + 2' --order 1");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "Optimal");
    CHECK(j["f_star"].get<double>() == doctest::Approx(1.0).epsilon(1e-7));
  }

  TEST_CASE("exit codes") {
    CHECK(run("finite-min --vars x --objective x --ineq '-1 - x^2'").code == 2);
    CHECK(run("finite-min --vars x,y --objective '(x^2 + y^2 - 1)^2' --order 2 --max-order 2").code == 3);
    CHECK(run("finite-min --vars x --objective 'x +'").code == 4);
    CHECK(run("finite-min --vars x --objective 'z'").code == 4);
    CHECK(run("finite-min --vars x --objective x --order 0").code == 4);
    CHECK(run("polar-min --vars x --objective x --polar-mode bogus").code == 4);
    CHECK(run("finite-min --problem /nonexistent/problem.json").code == 4);
  }

  TEST_CASE("problem file and output file") {
    fs::path problem = scratch() / "problem.json";
    fs::path output = scratch() / "out.json";
    std::ofstream(problem) << R"({"vars": ["x", "y"], "objective": "x^2 + y^2",
                                 "inequalities": ["1 - x^2 - y^2"], "equalities": ["x - y"]})";
    fs::remove(output);
    Run r = run("finite-min --problem " + problem.string() + " --output " + output.string());
    CHECK(r.code == 0);
    std::ifstream in(output);
    REQUIRE(in);
    auto j = nlohmann::json::parse(in);
    CHECK(j["status"] == "Exact");
    REQUIRE(j["minimizers"].size() == 1);
    for (const auto& c : j["minimizers"][0]["point"]) CHECK(std::abs(c.get<double>()) <= 1e-6);

    std::ofstream(problem) << R"({"vars": ["x"], "objective": 3})";
    CHECK(run("finite-min --problem " + problem.string()).code == 4);
  }

  TEST_CASE("polar-min on the cusp") {
    Run r = run("polar-min --vars x,y --objective x --ineq 'x^3 - y^2' --ineq '1 - x^2 - y^2' --order 5 "
                "--extract-tol 2e-3");
    CHECK(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["f_star"].get<double>()) <= 5e-3);
  }
}
