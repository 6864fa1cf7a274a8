#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>

#include "cli_run.hpp"

using clirun::config;
using clirun::run;
using nlohmann::json;

namespace {

const char* kGoodConfig = R"({
  "schema_version": 1,
  "metric": {"family": "riemannian", "dimension": 2, "domain": {"lower": [-1, -1], "upper": [1, 1]}},
  "samples": {"count": 20, "seed": 1}
})";

json parse(const std::string& s) { return json::parse(s); }

}  // namespace

TEST(Cli, UnknownCommandIsConfigError) {
  EXPECT_EQ(run({"frobnicate", "--config", config("euclidean2.json")}).code, 2);
  EXPECT_EQ(run({"eval"}).code, 2);
  EXPECT_EQ(run({"eval", "--config", config("euclidean2.json"), "--format", "xml"}).code, 2);
}

TEST(Cli, HelpExitsCleanly) {
  auto o = run({"--help"});
  EXPECT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("--config"), std::string::npos);
}

TEST(Cli, MissingFileIsConfigError) {
  auto o = run({"eval", "--config", "/nonexistent/finslerlab.json"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("cannot open"), std::string::npos);
}

TEST(Cli, MalformedConfigsAreRejected) {
  const std::string bad_json = clirun::write_file("cli", "bad.json", "{ \"schema_version\": 1, ");
  EXPECT_EQ(run({"eval", "--config", bad_json}).code, 2);

  json doc = json::parse(kGoodConfig);
  doc["metric"]["colour"] = "blue";
  EXPECT_EQ(run({"eval", "--config", clirun::write_file("cli", "unknown.json", doc.dump())}).code, 2);

  doc = json::parse(kGoodConfig);
  doc["schema_version"] = 7;
  EXPECT_EQ(run({"eval", "--config", clirun::write_file("cli", "schema.json", doc.dump())}).code, 2);

  doc = json::parse(kGoodConfig);
  doc["metric"]["dimension"] = 9;
  EXPECT_EQ(run({"eval", "--config", clirun::write_file("cli", "dim.json", doc.dump())}).code, 2);

  doc = json::parse(kGoodConfig);
  doc["metric"]["a"] = json::array({json::array({"1", "0"}), json::array({"0", "x1 +"})});
  EXPECT_EQ(run({"eval", "--config", clirun::write_file("cli", "expr.json", doc.dump())}).code, 2);

  // A geodesic run without a geodesic section.
  EXPECT_EQ(run({"geodesic", "--config", clirun::write_file("cli", "nogeo.json", kGoodConfig)}).code, 2);
}

TEST(Cli, EvalOnEuclideanIsFlat) {
  auto o = run({"eval", "--config", config("euclidean2.json"), "--samples", "4"});
  ASSERT_EQ(o.code, 0) << o.err;
  auto r = parse(o.out);
  EXPECT_EQ(r["command"], "eval");
  EXPECT_EQ(r["status"], "pass");
  EXPECT_EQ(r["samples"].size(), 4u);
  for (const char* f : {"C", "I", "M", "G", "N", "B", "R", "L", "J", "Lbar"})
    EXPECT_EQ(r["summary"]["max_abs"][f].get<double>(), 0.0) << f;
  for (const auto& s : r["samples"]) {
    EXPECT_NEAR(s["F"].get<double>() * s["F"].get<double>(),
                s["y"][0].get<double>() * s["y"][0].get<double>() + s["y"][1].get<double>() * s["y"][1].get<double>(),
                1e-14);
  }
}

TEST(Cli, EvalOnBerwaldRandersIsCReducible) {
  auto o = run({"eval", "--config", config("randers_berwald3.json"), "--samples", "5"});
  ASSERT_EQ(o.code, 0) << o.err;
  auto r = parse(o.out);
  EXPECT_LT(r["summary"]["max_abs"]["M"].get<double>(), 1e-8);
  EXPECT_GT(r["summary"]["max_abs"]["C"].get<double>(), 1e-3);
}

TEST(Cli, ClassifySphere) {
  auto o = run({"classify", "--config", config("sphere2.json")});
  ASSERT_EQ(o.code, 0) << o.err;
  auto r = parse(o.out);
  for (const auto& [name, holds] : r["summary"]["verdicts"].items()) EXPECT_TRUE(holds.get<bool>()) << name;
  EXPECT_TRUE(r["summary"]["warnings"].empty());
}

TEST(Cli, ClassifyRandersSeparatesBerwald) {
  auto o = run({"classify", "--config", config("randers3.json")});
  ASSERT_EQ(o.code, 0) << o.err;
  auto v = parse(o.out)["summary"]["verdicts"];
  EXPECT_FALSE(v["riemannian"].get<bool>());
  EXPECT_FALSE(v["berwald"].get<bool>());
  EXPECT_TRUE(v["c_reducible"].get<bool>());
}

TEST(Cli, VerifyAllPasses) {
  json doc = json::parse(clirun::read_file(config("randers3.json")));
  doc["verify"] = {{"connection", "all"}, {"process", "all"}};
  doc["samples"]["count"] = 3;
  auto o = run({"verify", "--config", clirun::write_file("cli", "verify_all.json", doc.dump())});
  ASSERT_EQ(o.code, 0) << o.err;
  auto r = parse(o.out);
  EXPECT_TRUE(r["summary"]["pass"].get<bool>());
  EXPECT_EQ(r["processes"].size(), 16u);
  EXPECT_EQ(r["diagram"].size(), 6u);

  doc["verify"] = {{"connection", "shen"}, {"process", "shen_l"}};
  o = run({"verify", "--config", clirun::write_file("cli", "verify_one.json", doc.dump())});
  ASSERT_EQ(o.code, 0) << o.err;
  r = parse(o.out);
  ASSERT_EQ(r["processes"].size(), 1u);
  EXPECT_EQ(r["processes"][0]["base"], "shen");

  doc["verify"] = {{"connection", "wagner"}};
  EXPECT_EQ(run({"verify", "--config", clirun::write_file("cli", "verify_bad.json", doc.dump())}).code, 2);
}

TEST(Cli, GeodesicWritesTrajectory) {
  auto dir = clirun::scratch_dir("cli_geo");
  auto o = run({"geodesic", "--config", config("euclidean2.json"), "--out", dir.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  auto r = json::parse(clirun::read_file(dir / "geodesic.json"));
  EXPECT_NEAR(r["trajectory"]["x_end"][0].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(r["trajectory"]["x_end"][1].get<double>(), 0.0, 1e-12);
  EXPECT_EQ(r["cartan_fit"]["slope"].get<double>(), 0.0);

  const std::string csv = clirun::read_file(dir / "trajectory.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x1,x2,v1,v2,F");
  EXPECT_NE(csv.find("# fit_slope="), std::string::npos);
  EXPECT_NE(csv.find("# landsberg_at_zero="), std::string::npos);
  // 51 samples of the trajectory plus the header and five footer lines.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 57);
}

TEST(Cli, GeodesicLeavingTheChartFails) {
  json doc = json::parse(clirun::read_file(config("euclidean2.json")));
  doc["geodesic"]["duration"] = 5;
  auto o = run({"geodesic", "--config", clirun::write_file("cli", "exit.json", doc.dump())});
  EXPECT_EQ(o.code, 1);
  auto r = parse(o.out);
  EXPECT_EQ(r["status"], "fail");
  EXPECT_NEAR(r["last_valid_t"].get<double>(), 1.0, 0.1);
}

TEST(Cli, OutputIsDeterministic) {
  const std::vector<std::string> args = {"verify", "--config", config("randers3.json"), "--samples", "6"};
  setenv("FINSLERLAB_THREADS", "1", 1);
  auto a = run(args);
  setenv("FINSLERLAB_THREADS", "4", 1);
  auto b = run(args);
  auto c = run(args);
  unsetenv("FINSLERLAB_THREADS");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(b.out, c.out);
}

TEST(Cli, SeedOverrideChangesSamples) {
  auto a = run({"eval", "--config", config("randers2.json"), "--samples", "3"});
  auto b = run({"eval", "--config", config("randers2.json"), "--samples", "3", "--seed", "2"});
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_NE(a.out, b.out);
  EXPECT_EQ(parse(b.out)["seed"].get<int>(), 2);
}

TEST(Cli, CsvFormat) {
  auto o = run({"classify", "--config", config("randers2.json"), "--format", "csv"});
  ASSERT_EQ(o.code, 0);
  EXPECT_EQ(o.out.substr(0, o.out.find('\n')), "predicate,tensor,holds,max_normalized,witness");
  auto e = run({"eval", "--config", config("randers2.json"), "--format", "csv", "--samples", "2"});
  EXPECT_EQ(e.out.substr(0, e.out.find('\n')), "sample,field,index,value");
}

TEST(Cli, InstalledBinaryExitCodes) {
  const std::string bin = FINSLERLAB_BINARY;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status(bin + " classify --config " + config("sphere2.json")), 0);
  EXPECT_EQ(status(bin + " eval --config /nonexistent.json"), 2);
  EXPECT_EQ(status(bin + " bogus --config " + config("sphere2.json")), 2);
}
