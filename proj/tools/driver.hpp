#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlab/specfun.hpp"

namespace qlab::cli {

// Bad flags, unknown keys, malformed values and gate violations; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Command { identities, geodesic, divisor, moment, sweep };

using ParamMap = std::map<std::string, std::string>;

std::string commandName(Command c);

// Effective run configuration. List-valued keys (T, m, Y, P, v) are swept as
// a Cartesian product in that nesting order, T outermost.
struct RunConfig {
  Command command = Command::identities;
  std::vector<double> T;
  std::vector<std::int64_t> m;
  std::vector<double> Y;
  std::vector<double> P;
  std::vector<cplx> v;
  double Y0 = 2.0;
  double tol = 0.0;  // 0: the command's default relative tolerance
  std::string filter;
  std::string outputPath;  // empty: CSV to stdout
  int threadCount = 1;
  PrecisionPolicy precision;

  // Validates names against the command's schema, parses values, fills
  // defaults and checks the desk gates. Throws UsageError.
  static RunConfig fromParams(const ParamMap& params);
  // Every effective key, formatted so fromParams(toParams()) is the same run.
  ParamMap toParams() const;
};

// key = value lines; '#' starts a comment.
ParamMap parseKeyValue(const std::string& text);
// key=value file, or a JSON sidecar (its "config" object is used).
ParamMap loadConfigFile(const std::string& path);

// Keys accepted by a command.
const std::set<std::string>& schemaFor(Command c);

struct Table {
  std::string name;  // report kind, used for file names in a sweep
  std::string note;  // emitted as the '#' header line
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  bool complete = true;
  int failures = 0;  // rows whose computation threw
};

std::string toCsv(const Table& t);
std::string sidecarJson(const RunConfig& cfg, const Table& t);

// geodesic / divisor / moment: one row per parameter point.
Table runReport(const RunConfig& cfg);

// Shortest round-trip decimal form.
std::string formatDouble(double x);
std::string formatComplex(cplx z);
cplx parseComplex(const std::string& s);

// Full command-line entry point; returns the process exit code.
int runMain(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qlab::cli
