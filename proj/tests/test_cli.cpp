#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bosegas/cli.hpp"

namespace fs = std::filesystem;
using bosegas::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "bosegas");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = bosegas::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("bosegas_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const std::string& name, const json& j) {
  const auto p = dir / name;
  std::ofstream(p) << j.dump();
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json small_sim() {
  return {{"d", 1}, {"n_per_dim", 64}, {"L", 32.0}, {"P0", {0.4}}, {"dt", 0.01},
          {"T", 1.0}, {"sample_interval", 0.1}, {"beta0", {{"amplitude", 0.05}, {"width", 1.0}}}};
}

}  // namespace

TEST_CASE("simulate writes a trajectory with the documented header") {
  const auto dir = scratch("sim");
  const auto cfg = write_config(dir, "c.json", small_sim());
  const auto r = run({"simulate", "--config", cfg, "--out", dir.string()});
  REQUIRE(r.code == 0);
  std::ifstream csv(dir / "trajectory.csv");
  std::string comment, header;
  std::getline(csv, comment);
  std::getline(csv, header);
  CHECK(comment.rfind("# bosegas 0.1.0 config_hash=", 0) == 0);
  CHECK(header == "t,X_1,P_1,Pdot_1,H,reBetaL2,gradImBetaL2,solitonGap");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 11);

  const json res = json::parse(slurp(dir / "simulate.json"));
  CHECK(res["tool_version"] == "0.1.0");
  CHECK(res["command"] == "simulate");
  CHECK(res["config_hash"].get<std::string>().size() == 16);
  CHECK(comment.find(res["config_hash"].get<std::string>()) != std::string::npos);
  CHECK(res["checks"].size() == 2);
}

TEST_CASE("2d header lists every component") {
  const auto dir = scratch("sim2");
  json j = small_sim();
  j["d"] = 2;
  j["n_per_dim"] = 16;
  j["P0"] = {0.3, 0.1};
  j["T"] = 0.2;
  const auto r = run({"simulate", "--config", write_config(dir, "c.json", j), "--out", dir.string()});
  REQUIRE(r.code == 0);
  std::ifstream csv(dir / "trajectory.csv");
  std::string comment, header;
  std::getline(csv, comment);
  std::getline(csv, header);
  CHECK(header == "t,X_1,X_2,P_1,P_2,Pdot_1,Pdot_2,H,reBetaL2,gradImBetaL2,solitonGap");
}

TEST_CASE("reruns are byte identical and independent of the thread count") {
  const auto a = scratch("rerun_a"), b = scratch("rerun_b"), c = scratch("rerun_c");
  const auto cfg = write_config(a, "c.json", small_sim());
  REQUIRE(run({"simulate", "--config", cfg, "--out", a.string()}).code == 0);
  REQUIRE(run({"simulate", "--config", cfg, "--out", b.string()}).code == 0);
  REQUIRE(run({"--threads", "3", "simulate", "--config", cfg, "--out", c.string()}).code == 0);
  bosegas::set_thread_count(1);
  for (const char* f : {"trajectory.csv", "simulate.json"}) {
    CHECK(slurp(a / f) == slurp(b / f));
    CHECK(slurp(a / f) == slurp(c / f));
  }
}

TEST_CASE("effective config round trips to the same hash") {
  const auto dir = scratch("roundtrip");
  const auto r = run({"simulate", "--config", write_config(dir, "c.json", small_sim()), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const json res = json::parse(slurp(dir / "simulate.json"));
  const auto dir2 = scratch("roundtrip2");
  const auto cfg2 = write_config(dir2, "eff.json", res["effective_config"]);
  REQUIRE(run({"simulate", "--config", cfg2, "--out", dir2.string()}).code == 0);
  const json res2 = json::parse(slurp(dir2 / "simulate.json"));
  CHECK(res2["config_hash"] == res["config_hash"]);
  CHECK(res2["effective_config"] == res["effective_config"]);
}

TEST_CASE("configuration errors exit with status 2") {
  const auto dir = scratch("errors");
  json neg = small_sim();
  neg["dt"] = -0.01;
  auto r = run({"simulate", "--config", write_config(dir, "neg.json", neg), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("invalid-dt") != std::string::npos);

  json typo = small_sim();
  typo["dtt"] = 0.01;
  r = run({"simulate", "--config", write_config(dir, "typo.json", typo), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("unknown-key") != std::string::npos);

  r = run({"simulate", "--config", (dir / "missing.json").string()});
  CHECK(r.code == 2);
  r = run({"simulate"});
  CHECK(r.code == 2);
  r = run({"no-such-command"});
  CHECK(r.code == 2);

  std::ofstream(dir / "broken.json") << "{ \"d\": ";
  r = run({"simulate", "--config", (dir / "broken.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("config-parse") != std::string::npos);
}

TEST_CASE("monitor violations exit with status 4") {
  const auto dir = scratch("monitor");
  json j = small_sim();
  j["monitor_tol"] = -1.0;  // any slack counts as a violation
  const auto r = run({"simulate", "--config", write_config(dir, "c.json", j), "--out", dir.string()});
  CHECK(r.code == 4);
}

TEST_CASE("resolution failures exit with status 3") {
  const auto dir = scratch("resolution");
  const json j{{"kind", "R4"}, {"t_lo", 10.0}, {"t_hi", 20.0}, {"count", 3}, {"quadrature", {{"max_nodes", 10.0}}}};
  const auto r = run({"remainder", "--config", write_config(dir, "c.json", j), "--out", dir.string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("unresolved-oscillation") != std::string::npos);
}

TEST_CASE("lambda-fit reports slope, expectation and samples") {
  const auto dir = scratch("lambda");
  const json j{{"count", 4}, {"lambda_count", 3}};
  const auto r = run({"lambda-fit", "--config", write_config(dir, "c.json", j), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const json res = json::parse(slurp(dir / "lambda-fit.json"));
  for (const char* key : {"slope", "slope_ci", "expected", "lambda_min", "samples", "lambda_range_min"})
    CHECK(res.contains(key));
  CHECK(res["expected"].get<double>() == Catch::Approx(5.0));
  CHECK(res["samples"].size() == 4);
  CHECK(res["lambda_range_samples"].size() == 3);
  CHECK(res["lambda_range_min"].get<double>() > 0.0);
  CHECK(res["checks"][0]["id"] == "AC1");
}

TEST_CASE("soliton at rest matches the closed form") {
  const auto dir = scratch("soliton");
  const json j{{"d", 1}, {"n_per_dim", 64}, {"L", 32.0}, {"P", {0.0}}};
  const auto r = run({"soliton", "--config", write_config(dir, "c.json", j), "--out", dir.string()});
  REQUIRE(r.code == 0);
  const json res = json::parse(slurp(dir / "soliton.json"));
  for (const auto& c : res["checks"]) CHECK(c["pass"].get<bool>());
  std::ifstream csv(dir / "profile.csv");
  std::string comment, header;
  std::getline(csv, comment);
  std::getline(csv, header);
  CHECK(header == "x,S1,S2");
}

TEST_CASE("report consolidates results") {
  const auto dir = scratch("report");
  const json good{{"tool_version", "0.1.0"}, {"command", "x"}, {"config_hash", "0"},
                  {"checks", {{{"id", "AC9"}, {"name", "a"}, {"pass", true}}}}};
  json bad = good;
  bad["checks"][0]["pass"] = false;
  bad["checks"][0]["id"] = "AC2";
  json old = good;
  old["tool_version"] = "0.0.1";
  const auto g = write_config(dir, "good.json", good);
  const auto b = write_config(dir, "bad.json", bad);
  const auto o = write_config(dir, "old.json", old);

  auto r = run({"report", g, "--out", dir.string()});
  CHECK(r.code == 0);
  json rep = json::parse(slurp(dir / "report.json"));
  CHECK(rep["pass"] == true);
  CHECK(rep["criteria"]["AC9"] == true);

  r = run({"report", g, b, "--out", dir.string()});
  CHECK(r.code == 1);
  rep = json::parse(slurp(dir / "report.json"));
  CHECK(rep["criteria"]["AC2"] == false);
  CHECK(rep["rows"].size() == 2);

  r = run({"report", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("missing-inputs") != std::string::npos);

  r = run({"report", g, o, "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("version-mismatch") != std::string::npos);
}

TEST_CASE("help exits cleanly") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("simulate") != std::string::npos);
}
