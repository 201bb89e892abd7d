#include "driver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <charconv>
#include <cmath>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "qlab/geodesic.hpp"
#include "qlab/identities.hpp"
#include "qlab/moments.hpp"
#include "qlab/psi.hpp"

#ifndef QLAB_VERSION
#define QLAB_VERSION "dev"
#endif

namespace qlab::cli {

namespace {

std::atomic<bool> gInterrupted{false};

extern "C" void onInterrupt(int) { gInterrupted.store(true); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> splitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parseDouble(const std::string& key, const std::string& s) {
  double x = 0.0;
  const auto t = trim(s);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || p != t.data() + t.size() || !std::isfinite(x))
    throw UsageError("invalid number '" + s + "' for " + key);
  return x;
}

std::int64_t parseInt(const std::string& key, const std::string& s) {
  std::int64_t x = 0;
  const auto t = trim(s);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || p != t.data() + t.size()) throw UsageError("invalid integer '" + s + "' for " + key);
  return x;
}

template <class T, class F>
std::vector<T> parseList(const std::string& key, const std::string& s, F parse) {
  std::vector<T> out;
  for (const auto& item : splitList(s)) out.push_back(parse(key, item));
  if (out.empty()) throw UsageError("empty list for " + key);
  return out;
}

template <class T, class F>
std::string joinList(const std::vector<T>& xs, F fmt) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt(xs[i]);
  return s;
}

std::string quoteCsv(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

Command parseCommand(const std::string& s) {
  const auto t = trim(s);
  if (t == "identities") return Command::identities;
  if (t == "geodesic") return Command::geodesic;
  if (t == "divisor") return Command::divisor;
  if (t == "moment") return Command::moment;
  if (t == "sweep") return Command::sweep;
  throw UsageError("unknown command '" + s + "'");
}

double defaultTol(Command c) { return c == Command::moment ? 1e-8 : 1e-10; }

// --- per-command rows -------------------------------------------------------

using Row = std::vector<std::string>;

struct Point {
  double T = 0.0;
  std::int64_t m = 0;
  double Y = 0.0, P = 0.0;
  cplx v;
};

std::vector<Point> points(const RunConfig& c) {
  std::vector<Point> out;
  switch (c.command) {
    case Command::geodesic:
      for (double T : c.T) out.push_back({T, 0, 0.0, 0.0, 0.0});
      break;
    case Command::divisor:
      for (double T : c.T)
        for (auto m : c.m)
          for (double Y : c.Y)
            for (double P : c.P) out.push_back({T, m, Y, P, 0.0});
      break;
    case Command::moment:
      for (double T : c.T)
        for (cplx v : c.v) out.push_back({T, 0, 0.0, 0.0, v});
      break;
    default:
      break;
  }
  return out;
}

const std::vector<std::string>& columnsFor(Command c) {
  static const std::vector<std::string> geo{"T", "Y0", "I", "innerProduct", "a", "b", "c", "residual",
                                            "relResidual", "ratioThm1", "status"};
  static const std::vector<std::string> div{"T", "m", "Y", "P", "R", "brute", "mainTerm", "deviation",
                                            "relDeviation", "errorShape", "normalized", "status"};
  static const std::vector<std::string> mom{"T", "v_re", "v_im", "numeric_re", "numeric_im", "mainTerm_re",
                                            "mainTerm_im", "deviation_re", "deviation_im", "relDeviation",
                                            "normalized", "status"};
  static const std::vector<std::string> none;
  switch (c) {
    case Command::geodesic: return geo;
    case Command::divisor: return div;
    case Command::moment: return mom;
    default: return none;
  }
}

std::string noteFor(Command c) {
  switch (c) {
    case Command::geodesic:
      return "geodesic: standard bump with support [1/Y0, Y0]; I = int E*(iy)^2 psi(y) dy/y; residual = I - "
             "(2 innerProduct + a + b + c); relResidual = |residual|/I; all values plain reals, no log scaling";
    case Command::divisor:
      return "divisor: window on [Y, 2Y] with ramps Y/P; R = P + T|m|/Y; brute and mainTerm are plain "
             "reals; normalized = |deviation|/errorShape";
    case Command::moment:
      return "moment: shifts (v+iT, v-iT, iT, -iT); numeric and mainTerm include (1/2 pi) and cosh(pi T) from the "
             "weight, plain complex; normalized = |deviation|/T^(-1/33)";
    default:
      return "";
  }
}

Row computeRow(const RunConfig& c, const Point& p) {
  const auto f = formatDouble;
  const double tol = c.tol > 0.0 ? c.tol : defaultTol(c.command);
  switch (c.command) {
    case Command::geodesic: {
      geodesic::GeodesicOptions opts;
      opts.relTol = tol;
      const auto r = geodesic::theorem2Residual(p.T, standardBump(c.Y0), opts);
      return {f(p.T),        f(c.Y0), f(r.I),        f(r.innerProduct),      f(r.a), f(r.b),
              f(r.c),        f(r.residual), f(std::abs(r.residual) / r.I), f(r.ratioThm1), "ok"};
    }
    case Command::divisor: {
      const auto r = moments::divisorReport(p.T, p.m, p.Y, p.P);
      return {f(r.T),           std::to_string(r.m), f(r.Y),          f(r.P),           f(r.R),
              f(r.brute),       f(r.mainTerm),       f(r.deviation),  f(r.relDeviation), f(r.errorShape),
              f(r.normalized), "ok"};
    }
    case Command::moment: {
      const auto r = moments::momentReport(p.v, p.T, tol);
      return {f(r.T),
              f(p.v.real()),
              f(p.v.imag()),
              f(r.numeric.real()),
              f(r.numeric.imag()),
              f(r.mainTerm.real()),
              f(r.mainTerm.imag()),
              f(r.deviation.real()),
              f(r.deviation.imag()),
              f(r.relDeviation),
              f(r.normalized),
              "ok"};
    }
    default:
      throw UsageError("not a report command");
  }
}

Row failedRow(const RunConfig& c, const Point& p, const std::string& msg) {
  Row r(columnsFor(c.command).size(), "");
  r[0] = formatDouble(p.T);
  r.back() = "error: " + msg;
  return r;
}

// --- output -----------------------------------------------------------------

std::string sidecarPath(const std::string& csvPath) {
  if (csvPath.size() > 4 && csvPath.compare(csvPath.size() - 4, 4, ".csv") == 0)
    return csvPath.substr(0, csvPath.size() - 4) + ".json";
  return csvPath + ".json";
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path);
}

void emit(const RunConfig& cfg, const Table& t, const std::string& csvPath, std::ostream& out) {
  if (csvPath.empty()) {
    out << toCsv(t);
    return;
  }
  writeFile(csvPath, toCsv(t));
  writeFile(sidecarPath(csvPath), sidecarJson(cfg, t));
}

Table identitiesTable(const std::vector<identities::IdentityRow>& rows) {
  Table t;
  t.name = "identities";
  t.note = "identities: measured = worst deviation over the row's samples, compared against tolerance";
  t.columns = {"name", "measured", "tolerance", "pass", "error"};
  for (const auto& r : rows) {
    t.rows.push_back({r.name, formatDouble(r.measured), formatDouble(r.tolerance), r.pass ? "1" : "0", r.error});
    if (!r.pass) ++t.failures;
  }
  return t;
}

int runIdentities(const RunConfig& cfg, std::ostream& out) {
  std::vector<identities::IdentityRow> rows;
  try {
    rows = identities::runIdentitySuite(cfg.filter);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  bool ok = true;
  for (const auto& r : rows) {
    ok = ok && r.pass;
    out << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(18) << r.name << " measured "
        << std::setw(12) << formatDouble(r.measured) << " tol " << std::setw(8) << formatDouble(r.tolerance) << " "
        << std::fixed << std::setprecision(2) << r.seconds << "s" << std::defaultfloat << std::setprecision(6);
    if (!r.error.empty()) out << "  error: " << r.error;
    out << "  " << r.what << "\n";
  }
  out << (ok ? "all " : "some ") << rows.size() << " identity rows " << (ok ? "passed" : "did not pass") << "\n";
  if (!cfg.outputPath.empty()) {
    const auto t = identitiesTable(rows);
    writeFile(cfg.outputPath, toCsv(t));
    writeFile(sidecarPath(cfg.outputPath), sidecarJson(cfg, t));
  }
  return ok ? 0 : 1;
}

// The three desk grids behind the sweep command.
std::vector<RunConfig> sweepConfigs(const RunConfig& cfg) {
  auto make = [&](ParamMap p) {
    p["threads"] = std::to_string(cfg.threadCount);
    if (!cfg.outputPath.empty()) p["out"] = cfg.outputPath + "." + p["command"] + ".csv";
    if (cfg.tol > 0.0 && p["command"] != "divisor") p["tol"] = formatDouble(cfg.tol);
    return RunConfig::fromParams(p);
  };
  return {make({{"command", "geodesic"}, {"T", "40,80,160"}, {"Y0", "2"}}),
          make({{"command", "divisor"}, {"T", "20"}, {"m", "1"}, {"P", "4"}, {"Y", "1e4,1e5,1e6"}}),
          make({{"command", "moment"}, {"T", "20,40,80"}, {"v", "0.1i"}})};
}

}  // namespace

std::string commandName(Command c) {
  switch (c) {
    case Command::identities: return "identities";
    case Command::geodesic: return "geodesic";
    case Command::divisor: return "divisor";
    case Command::moment: return "moment";
    case Command::sweep: return "sweep";
  }
  return "";
}

std::string formatDouble(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string formatComplex(cplx z) {
  const std::string im = formatDouble(z.imag());
  return formatDouble(z.real()) + (im[0] == '-' ? "" : "+") + im + "i";
}

// "a", "bi", "a+bi", "a-bi"
cplx parseComplex(const std::string& s0) {
  const std::string s = trim(s0);
  if (s.empty()) throw UsageError("empty complex value");
  if (s.back() != 'i') return {parseDouble("v", s), 0.0};
  const std::string body = s.substr(0, s.size() - 1);
  std::size_t split = std::string::npos;
  for (std::size_t k = 1; k < body.size(); ++k)
    if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') split = k;
  if (split == std::string::npos) {
    if (body.empty() || body == "+" || body == "-") return {0.0, body == "-" ? -1.0 : 1.0};
    return {0.0, parseDouble("v", body[0] == '+' ? body.substr(1) : body)};
  }
  std::string imPart = body.substr(split);
  if (imPart == "+" || imPart == "-") imPart += "1";
  if (imPart[0] == '+') imPart = imPart.substr(1);
  return {parseDouble("v", body.substr(0, split)), parseDouble("v", imPart)};
}

const std::set<std::string>& schemaFor(Command c) {
  static const std::set<std::string> ids{"command", "filter", "out", "threads"};
  static const std::set<std::string> geo{"command", "T", "Y0", "tol", "out", "threads"};
  static const std::set<std::string> div{"command", "T", "m", "Y", "P", "out", "threads"};
  static const std::set<std::string> mom{"command", "T", "v", "tol", "out", "threads"};
  static const std::set<std::string> swp{"command", "tol", "out", "threads"};
  switch (c) {
    case Command::identities: return ids;
    case Command::geodesic: return geo;
    case Command::divisor: return div;
    case Command::moment: return mom;
    case Command::sweep: return swp;
  }
  return ids;
}

RunConfig RunConfig::fromParams(const ParamMap& params) {
  RunConfig c;
  const auto cmd = params.find("command");
  if (cmd == params.end()) throw UsageError("no command given");
  c.command = parseCommand(cmd->second);
  const auto& schema = schemaFor(c.command);
  for (const auto& [k, v] : params)
    if (!schema.count(k)) throw UsageError("parameter '" + k + "' is not valid for command " + commandName(c.command));

  auto get = [&](const std::string& k, const std::string& dflt) {
    const auto it = params.find(k);
    return it == params.end() ? dflt : it->second;
  };
  if (params.count("out")) c.outputPath = trim(params.at("out"));
  c.threadCount = int(parseInt("threads", get("threads", "1")));
  if (c.threadCount < 1 || c.threadCount > 256) throw UsageError("threads must lie in [1, 256]");
  if (params.count("tol")) {
    c.tol = parseDouble("tol", params.at("tol"));
    if (!(c.tol > 0.0 && c.tol < 1.0)) throw UsageError("tol must lie in (0, 1)");
  }
  c.filter = trim(get("filter", ""));

  auto positive = [](const std::string& key, const std::string& s) {
    const double x = parseDouble(key, s);
    if (!(x > 0.0)) throw UsageError(key + " must be positive");
    return x;
  };
  switch (c.command) {
    case Command::geodesic:
      c.T = parseList<double>("T", get("T", "40"), positive);
      c.Y0 = positive("Y0", get("Y0", "2"));
      if (!(c.Y0 > 1.0)) throw UsageError("Y0 must exceed 1");
      for (double T : c.T)
        if (T > 200.0) throw UsageError("gate: geodesic runs are limited to T <= 200 (got " + formatDouble(T) + ")");
      break;
    case Command::divisor:
      c.T = parseList<double>("T", get("T", "20"), [](const std::string& k, const std::string& s) {
        const double x = parseDouble(k, s);
        if (x < 0.0) throw UsageError("T must be non-negative");
        return x;
      });
      c.m = parseList<std::int64_t>("m", get("m", "1"), [](const std::string& k, const std::string& s) {
        const auto x = parseInt(k, s);
        if (x == 0) throw UsageError("m must be nonzero");
        return x;
      });
      c.Y = parseList<double>("Y", get("Y", "1e5"), positive);
      c.P = parseList<double>("P", get("P", "4"), positive);
      for (double Y : c.Y)
        if (Y > 1e7) throw UsageError("gate: divisor runs are limited to Y <= 1e7 (got " + formatDouble(Y) + ")");
      for (double P : c.P)
        if (P < 1.0) throw UsageError("P must be at least 1");
      for (double Y : c.Y)
        for (double P : c.P)
          if (Y / P < 2.0) throw UsageError("ramp width Y/P must be at least 2");
      for (double T : c.T)
        if (T == 0.0) throw UsageError("divisor main term needs T > 0");
      break;
    case Command::moment:
      c.T = parseList<double>("T", get("T", "20"), positive);
      c.v = parseList<cplx>("v", get("v", "0.1i"), [](const std::string&, const std::string& s) { return parseComplex(s); });
      for (double T : c.T)
        if (T > 120.0) throw UsageError("gate: moment runs are limited to T <= 120 (got " + formatDouble(T) + ")");
      for (cplx v : c.v)
        if (v.real() != 0.0 || std::abs(v.imag()) > 2.0)
          throw UsageError("v must be purely imaginary with |v| <= 2 (got " + formatComplex(v) + ")");
      break;
    default:
      break;
  }
  c.precision.validate();
  return c;
}

ParamMap RunConfig::toParams() const {
  ParamMap p;
  p["command"] = commandName(command);
  p["threads"] = std::to_string(threadCount);
  if (!outputPath.empty()) p["out"] = outputPath;
  if (tol > 0.0) p["tol"] = formatDouble(tol);
  switch (command) {
    case Command::identities:
      if (!filter.empty()) p["filter"] = filter;
      break;
    case Command::geodesic:
      p["T"] = joinList(T, formatDouble);
      p["Y0"] = formatDouble(Y0);
      break;
    case Command::divisor:
      p["T"] = joinList(T, formatDouble);
      p["m"] = joinList(m, [](std::int64_t x) { return std::to_string(x); });
      p["Y"] = joinList(Y, formatDouble);
      p["P"] = joinList(P, formatDouble);
      break;
    case Command::moment:
      p["T"] = joinList(T, formatDouble);
      p["v"] = joinList(v, formatComplex);
      break;
    case Command::sweep:
      break;
  }
  return p;
}

ParamMap parseKeyValue(const std::string& text) {
  ParamMap p;
  std::stringstream ss(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(ss, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineNo) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw UsageError("config line " + std::to_string(lineNo) + ": empty key");
    p[key] = trim(line.substr(eq + 1));
  }
  return p;
}

ParamMap loadConfigFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read config file " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  const std::string text = buf.str();
  if (trim(text).rfind('{', 0) != 0) return parseKeyValue(text);
  ParamMap p;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& [k, v] : j.at("config").items()) p[k] = v.is_string() ? v.get<std::string>() : v.dump();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("bad JSON config " + path + ": " + e.what());
  }
  return p;
}

std::string toCsv(const Table& t) {
  std::string s = "# " + t.note + "\r\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + quoteCsv(t.columns[i]);
  s += "\r\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + quoteCsv(r[i]);
    s += "\r\n";
  }
  return s;
}

std::string sidecarJson(const RunConfig& cfg, const Table& t) {
  nlohmann::json j;
  j["tool"] = "qlab";
  j["version"] = QLAB_VERSION;
  j["config"] = cfg.toParams();
  j["columns"] = t.columns;
  j["rows"] = t.rows.size();
  j["complete"] = t.complete;
  j["failures"] = t.failures;
  const auto& pp = cfg.precision;
  j["precision"] = {{"targetRelErr", pp.targetRelErr},
                    {"maxSeriesTerms", pp.maxSeriesTerms},
                    {"emOrder", pp.emOrder},
                    {"besselTailCutoff", pp.besselTailCutoff}};
  return j.dump(2) + "\n";
}

Table runReport(const RunConfig& cfg) {
  const auto pts = points(cfg);
  std::vector<std::optional<Row>> slots(pts.size());
  std::vector<char> failed(pts.size(), 0);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      if (gInterrupted.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= pts.size()) return;
      try {
        slots[i] = computeRow(cfg, pts[i]);
      } catch (const std::exception& e) {
        slots[i] = failedRow(cfg, pts[i], e.what());
        failed[i] = 1;
      }
    }
  };
  const int n = std::max(1, std::min<int>(cfg.threadCount, int(pts.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  Table t;
  t.name = commandName(cfg.command);
  t.note = noteFor(cfg.command);
  t.columns = columnsFor(cfg.command);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) {
      t.complete = false;
      continue;
    }
    t.rows.push_back(*slots[i]);
    t.failures += failed[i];
  }
  return t;
}

int runMain(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"qlab: Eisenstein geodesic, shifted divisor and fourth-moment experiments"};
  std::map<std::string, std::string> flags;
  std::string configPath;
  app.add_option("--config", configPath, "key=value file or JSON sidecar; flags override it");
  const std::vector<std::pair<std::string, std::string>> names{
      {"command", "identities | geodesic | divisor | moment | sweep"},
      {"T", "spectral parameter(s), comma-separated"},
      {"m", "shift(s) of the divisor sum"},
      {"Y", "window size(s) of the divisor sum"},
      {"P", "ramp ratio(s): ramps have width Y/P"},
      {"v", "moment shift(s), e.g. 0.1i"},
      {"Y0", "bump support [1/Y0, Y0]"},
      {"out", "CSV path (sweep: file prefix); JSON sidecar written next to it"},
      {"threads", "worker threads"},
      {"tol", "relative tolerance of the main computation"},
      {"filter", "identity rows to run, comma-separated"}};
  std::map<std::string, CLI::Option*> opts;
  for (const auto& [k, help] : names) opts[k] = app.add_option("--" + k, flags[k], help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  RunConfig cfg;
  try {
    ParamMap params;
    if (!configPath.empty()) params = loadConfigFile(configPath);
    for (const auto& [k, o] : opts)
      if (o->count() > 0) params[k] = flags[k];
    if (!params.count("command")) params["command"] = "identities";
    cfg = RunConfig::fromParams(params);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  std::signal(SIGINT, onInterrupt);
  std::signal(SIGTERM, onInterrupt);
  gInterrupted.store(false);

  try {
    switch (cfg.command) {
      case Command::identities:
        return runIdentities(cfg, out);
      case Command::sweep: {
        int status = 0;
        for (const auto& sub : sweepConfigs(cfg)) {
          const auto t = runReport(sub);
          emit(sub, t, sub.outputPath, out);
          if (t.failures > 0 || !t.complete) status = 1;
          if (gInterrupted.load()) break;
        }
        return status;
      }
      default: {
        const auto t = runReport(cfg);
        emit(cfg, t, cfg.outputPath, out);
        return (t.failures > 0 || !t.complete) ? 1 : 0;
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qlab::cli
