#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "driver.hpp"
#include "qlab/identities.hpp"

using namespace qlab;
using namespace qlab::cli;

namespace {

int runArgs(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) {
  args.insert(args.begin(), "qlab");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream o, e;
  const int code = runMain(int(argv.size()), argv.data(), o, e);
  if (out) *out = o.str();
  if (err) *err = e.str();
  return code;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("complex and number formatting") {
  CHECK(parseComplex("0.1i") == cplx(0.0, 0.1));
  CHECK(parseComplex("-0.3i") == cplx(0.0, -0.3));
  CHECK(parseComplex("0.2+0.1i") == cplx(0.2, 0.1));
  CHECK(parseComplex("1e-3-2e-2i") == cplx(1e-3, -2e-2));
  CHECK(parseComplex("0.5") == cplx(0.5, 0.0));
  CHECK_THROWS_AS(parseComplex("abc"), UsageError);
  for (cplx z : {cplx(0.0, 0.1), cplx(-1.25, 3e-17), cplx(0.1, -0.7)}) CHECK(parseComplex(formatComplex(z)) == z);
  CHECK(formatDouble(0.1) == "0.1");
  CHECK(formatDouble(1e5) == "1e+05");
}

TEST_CASE("key=value parsing and schema validation") {
  const auto p = parseKeyValue("# divisor run\ncommand = divisor\nT=20  # spectral\n\nY = 1e4, 1e5\n");
  CHECK(p.at("command") == "divisor");
  CHECK(p.at("T") == "20");
  const auto c = RunConfig::fromParams(p);
  CHECK(c.Y == std::vector<double>{1e4, 1e5});
  CHECK(c.m == std::vector<std::int64_t>{1});
  CHECK_THROWS_AS(parseKeyValue("no equals sign"), UsageError);

  CHECK_THROWS_AS(RunConfig::fromParams({{"command", "geodesic"}, {"m", "2"}}), UsageError);
  CHECK_THROWS_AS(RunConfig::fromParams({{"command", "divisor"}, {"tol", "1e-8"}}), UsageError);
  CHECK_THROWS_AS(RunConfig::fromParams({{"command", "launch"}}), UsageError);
  CHECK_THROWS_AS(RunConfig::fromParams({{"command", "moment"}, {"T", "x"}}), UsageError);
  CHECK_THROWS_AS(RunConfig::fromParams({{"command", "moment"}, {"v", "0.1"}}), UsageError);
}

TEST_CASE("desk gates are named") {
  auto message = [](const ParamMap& p) {
    try {
      RunConfig::fromParams(p);
    } catch (const UsageError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message({{"command", "geodesic"}, {"T", "40,201"}}).find("T <= 200") != std::string::npos);
  CHECK(message({{"command", "divisor"}, {"Y", "2e7"}}).find("Y <= 1e7") != std::string::npos);
  CHECK(message({{"command", "moment"}, {"T", "121"}}).find("T <= 120") != std::string::npos);
  CHECK(message({{"command", "geodesic"}, {"T", "200"}}).empty());
}

TEST_CASE("config round trip through toParams") {
  const auto a = RunConfig::fromParams(
      {{"command", "moment"}, {"T", "20, 40"}, {"v", "0.1i,-0.25i"}, {"tol", "1e-7"}, {"threads", "2"}});
  const auto b = RunConfig::fromParams(a.toParams());
  CHECK(b.T == a.T);
  CHECK(b.v == a.v);
  CHECK(b.tol == a.tol);
  CHECK(b.threadCount == 2);
  CHECK(b.toParams() == a.toParams());
}

TEST_CASE("CSV quoting and header note") {
  Table t;
  t.note = "units note";
  t.columns = {"a", "b"};
  t.rows = {{"1", "x,y"}, {"2", "say \"hi\""}};
  CHECK(toCsv(t) == "# units note\r\na,b\r\n1,\"x,y\"\r\n2,\"say \"\"hi\"\"\"\r\n");
}

TEST_CASE("report rows are independent of the thread count") {
  auto cfg = RunConfig::fromParams({{"command", "divisor"}, {"T", "3,5"}, {"m", "1,-2"}, {"Y", "2e3"}, {"P", "4"}});
  const auto one = runReport(cfg);
  cfg.threadCount = 3;
  const auto three = runReport(cfg);
  CHECK(one.rows.size() == 4);
  CHECK(toCsv(one) == toCsv(three));
  CHECK(one.failures == 0);
  // T outermost, then m
  CHECK(one.rows[0][0] == "3");
  CHECK(one.rows[1][1] == "-2");
  CHECK(one.rows[2][0] == "5");
}

TEST_CASE("identity suite filter") {
  const auto rows = identities::runIdentitySuite("lambda-fe");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].name == "lambda-fe");
  CHECK(rows[0].pass);
  CHECK_THROWS_AS(identities::runIdentitySuite("lambda-fe,nope"), std::invalid_argument);
  CHECK(identities::identityNames().size() == 12);
}

TEST_CASE("command line exit codes and files") {
  std::string out, err;
  CHECK(runArgs({"--command", "identities", "--filter", "lambda-fe"}, &out) == 0);
  CHECK(out.find("PASS lambda-fe") != std::string::npos);
  CHECK(runArgs({"--command", "identities", "--filter", "bogus"}, &out, &err) == 2);
  CHECK(runArgs({"--command", "identities", "--T", "5"}, &out, &err) == 2);
  CHECK(err.find("not valid") != std::string::npos);
  CHECK(runArgs({"--no-such-flag"}, &out, &err) == 2);
  CHECK(runArgs({"--command", "moment", "--T", "150"}, &out, &err) == 2);

  const std::string base = "qlab_cli_test_div";
  REQUIRE(runArgs({"--command", "divisor", "--T", "5", "--Y", "2e3", "--out", base + ".csv"}) == 0);
  const std::string csv = slurp(base + ".csv"), json = slurp(base + ".json");
  CHECK(csv.rfind("# divisor", 0) == 0);
  CHECK(json.find("\"version\"") != std::string::npos);

  // repeated run is byte-identical; the sidecar re-ingested reproduces it
  REQUIRE(runArgs({"--command", "divisor", "--T", "5", "--Y", "2e3", "--out", base + ".csv"}) == 0);
  CHECK(slurp(base + ".csv") == csv);
  CHECK(slurp(base + ".json") == json);
  REQUIRE(runArgs({"--config", base + ".json", "--out", base + "_2.csv"}) == 0);
  CHECK(slurp(base + "_2.csv") == csv);

  // key=value file with a flag override
  {
    std::ofstream f(base + ".cfg");
    f << "command = divisor\nT = 5\nY = 1e3\n";
  }
  REQUIRE(runArgs({"--config", base + ".cfg", "--Y", "2e3", "--out", base + "_3.csv"}) == 0);
  CHECK(slurp(base + "_3.csv") == csv);

  for (const char* suffix : {".csv", ".json", "_2.csv", "_2.json", ".cfg", "_3.csv", "_3.json"})
    std::remove((base + suffix).c_str());
}
