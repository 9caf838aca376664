#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "relscat/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "relscat");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = relscat::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("relscat_cli_test_" + name);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit with 2") {
    const Run none = run({});
    CHECK(none.code == 2);
    CHECK(none.err.find("usage: relscat") != std::string::npos);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"zeros", "--bogus", "1"}).code == 2);
    CHECK(run({"zeros", "--l", "one"}).code == 2);
    CHECK(run({"--format", "xml", "zeros"}).code == 2);
    CHECK(run({"harmonics"}).code == 2);
    CHECK(run({"bk-channel", "--boxes", "1.5,3,6"}).code == 2);
    CHECK(run({"bk-channel", "--pol", "sideways"}).code == 2);
    CHECK(run({"--version"}).out == std::string(relscat::cli::kVersion) + "\n");
  }

  TEST_CASE("bk-channel s-wave envelope") {
    const Run r = run({"bk-channel", "--pol", "dirichlet", "--l", "0"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema"] == 1);
    CHECK(j["tool"]["name"] == "relscat");
    CHECK(j["subcommand"] == "bk-channel");
    CHECK(j["config"]["p"] == 0);
    const double rhs = j["result"]["rhs"]["value"];
    CHECK(std::fabs(rhs + 1.0 / (4.0 * std::sqrt(M_PI))) < 1e-9);
    CHECK(j["result"]["passed"] == true);
  }

  TEST_CASE("an oracle that misses its tolerance exits with 1") {
    const Run r = run({"bk-channel", "--pol", "tm", "--l", "2", "--boxes", "2.5,3,3.5"});
    CHECK(r.code == 1);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["result"]["passed"] == false);
  }

  TEST_CASE("repeat runs are byte-identical, whatever the thread count") {
    const std::vector<std::string> args{"phases", "--p", "1", "--lmax", "4", "--lambda-max", "10", "--n", "40"};
    const Run a = run(args);
    const Run b = run(args);
    std::vector<std::string> threaded{"--threads", "3"};
    threaded.insert(threaded.end(), args.begin(), args.end());
    const Run c = run(threaded);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    // The config line records the thread count only through the global options.
    CHECK(a.out.substr(a.out.find("\nchannel")) == c.out.substr(c.out.find("\nchannel")));
  }

  TEST_CASE("CSV artifacts carry a comment header") {
    const Run r = run({"eigenvalues", "--family", "maxwell-tm", "--max", "5"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# relscat 0.1.0");
    std::getline(in, line);
    CHECK(line == "# schema: 1");
    std::getline(in, line);
    CHECK(line.rfind("# config: {", 0) == 0);
    std::getline(in, line);
    CHECK(line == "l,mu,mult");
    std::getline(in, line);
    CHECK(line.rfind("1,2.74370726999", 0) == 0);
  }

  TEST_CASE("config file values apply and explicit flags win") {
    const auto cfg = scratch("cfg.txt");
    {
      std::ofstream f(cfg);
      f << "# zeros of psi_2\n";
      f << "l = 2\n";
      f << "max = 12\n";
      f << "format = json\n";
    }
    const Run from_file = run({"--config", cfg.string(), "zeros"});
    REQUIRE(from_file.code == 0);
    const auto j = nlohmann::json::parse(from_file.out);
    CHECK(j["config"]["l"] == 2);
    const Run override_flag = run({"--config", cfg.string(), "zeros", "--l", "1"});
    REQUIRE(override_flag.code == 0);
    CHECK(nlohmann::json::parse(override_flag.out)["config"]["l"] == 1);
    std::filesystem::remove(cfg);
    CHECK(run({"--config", cfg.string(), "zeros"}).code == 2);
  }

  TEST_CASE("--out writes the artifact to a file") {
    const auto path = scratch("zeros.csv");
    const Run r = run({"--out", path.string(), "zeros", "--l", "0", "--max", "10"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    const std::string text = slurp(path);
    CHECK(text == run({"zeros", "--l", "0", "--max", "10"}).out);
    std::filesystem::remove(path);
  }

  TEST_CASE("exact and finite-dimensional verifiers") {
    const Run h = run({"harmonics", "verify", "--dmin", "2", "--dmax", "3", "--lmax", "3"});
    REQUIRE(h.code == 0);
    CHECK(nlohmann::json::parse(h.out)["result"]["all_pass"] == true);
    const Run t = run({"tstar", "verify", "--seeds", "5", "--max-dim", "16"});
    REQUIRE(t.code == 0);
    CHECK(nlohmann::json::parse(t.out)["result"]["all_pass"] == true);
  }

  TEST_CASE("bk-full writes channel rows beside the report") {
    const auto path = scratch("full.json");
    const Run r = run({"--out", path.string(), "bk-full", "--mode", "forms", "--p", "0", "--lmax", "2"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(slurp(path));
    CHECK(j["subcommand"] == "bk-full");
    CHECK(j["result"]["passed"] == true);
    const std::string rows = slurp(path.string() + ".channels.csv");
    CHECK(rows.find("p0:dirichlet:l2") != std::string::npos);
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".channels.csv");
  }
}
