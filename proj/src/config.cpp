#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nehari/cli.hpp"

namespace nehari::cli {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw NehariError(ErrorKind::ConfigError, key + ": " + why);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out)) bad(key, "not a number: '" + v + "'");
  return out;
}

long to_int(const std::string& key, const std::string& v) {
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) bad(key, "not an integer: '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, "not a boolean: '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) bad(key, "empty list");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

Setter real(double RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_double(k, v); };
}

Setter opt_real(double NmomConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) { c.optimizer.*field = to_double(k, v); };
}

Setter opt_int(int NmomConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    c.optimizer.*field = static_cast<int>(to_int(k, v));
  };
}

Setter res_int(int Resolution::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    const long n = to_int(k, v);
    if (n < 2 || n > 100000) bad(k, "must be in [2, 100000]");
    c.resolution.*field = static_cast<int>(n);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem.preset",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v != "henon" && v != "nls") bad(k, "expected henon or nls");
         c.preset = v;
       }},
      {"problem.domain",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         try {
           c.domain = parse_domain(v);
         } catch (const NehariError&) {
           bad(k, "expected interval, square or disk");
         }
       }},
      {"problem.l", real(&RunConfig::l)},
      {"problem.p", real(&RunConfig::p)},
      {"problem.omega", real(&RunConfig::omega)},
      {"problem.lambda", real(&RunConfig::lambda)},
      {"problem.n_elements", res_int(&Resolution::n_elements)},
      {"problem.nx", res_int(&Resolution::nx)},
      {"problem.ny", res_int(&Resolution::ny)},
      {"problem.n_theta", res_int(&Resolution::n_theta)},
      {"problem.n_r", res_int(&Resolution::n_r)},
      {"problem.lin_tol", real(&RunConfig::lin_tol)},
      {"optimizer.sigma", opt_real(&NmomConfig::sigma)},
      {"optimizer.beta", opt_real(&NmomConfig::beta)},
      {"optimizer.rho", opt_real(&NmomConfig::rho)},
      {"optimizer.alpha_min", opt_real(&NmomConfig::alpha_min)},
      {"optimizer.alpha_max", opt_real(&NmomConfig::alpha_max)},
      {"optimizer.eps_tol", opt_real(&NmomConfig::eps_tol)},
      {"optimizer.tau0", opt_real(&NmomConfig::tau0)},
      {"optimizer.max_iter", opt_int(&NmomConfig::max_iter)},
      {"optimizer.max_backtracks", opt_int(&NmomConfig::max_backtracks)},
      {"optimizer.stagnation_tol", opt_real(&NmomConfig::stagnation_tol)},
      {"optimizer.stagnation_window", opt_int(&NmomConfig::stagnation_window)},
      {"experiment.l_lo", real(&RunConfig::l_lo)},
      {"experiment.l_hi", real(&RunConfig::l_hi)},
      {"experiment.tol", real(&RunConfig::bisect_tol)},
      {"experiment.eps_tol", real(&RunConfig::bisect_eps_tol)},
      {"experiment.warm_start",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.warm_start = to_bool(k, v); }},
      {"experiment.p_grid",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.p_grid = to_list(k, v); }},
      {"experiment.k_lo", real(&RunConfig::k_lo)},
      {"experiment.k_hi", real(&RunConfig::k_hi)},
      {"experiment.fit",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v != "inverse" && v != "exp" && v != "auto") bad(k, "expected inverse, exp or auto");
         c.fit = v;
       }},
      {"experiment.eigen_k",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const long n = to_int(k, v);
         if (n < 0 || n > 32) bad(k, "must be in [0, 32]");
         c.eigen_k = static_cast<int>(n);
       }},
      {"experiment.results_file",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v.empty() || v.find('/') != std::string::npos) bad(k, "must be a plain file name");
         c.results_file = v;
       }},
      {"seed.kind",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "paper-v0") c.seed_kind = SeedKind::V0;
         else if (v == "radial") c.seed_kind = SeedKind::Radial;
         else if (v == "file") c.seed_kind = SeedKind::File;
         else bad(k, "expected paper-v0, radial or file");
       }},
      {"seed.file", [](RunConfig& c, const std::string&, const std::string& v) { c.seed_file = v; }},
      {"seed.random",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const long n = to_int(k, v);
         if (n < 0 || n > 0xffffffffL) bad(k, "must be a non-negative 32-bit integer");
         c.random_seed = static_cast<unsigned>(n);
       }},
  };
  return table;
}

void validate(const RunConfig& c) {
  if (!(c.p > 1.0)) bad("problem.p", "must be greater than 1");
  if (c.preset == "nls" && !(c.omega > 0.0)) bad("problem.omega", "must be positive");
  if (c.preset == "henon" && !(c.l >= 0.0)) bad("problem.l", "must be non-negative");
  if (c.lin_tol < 0.0 || c.lin_tol >= 1.0) bad("problem.lin_tol", "must be in [0, 1)");
  if (c.domain == DomainKind::Disk && (c.resolution.n_theta < 4 || c.resolution.n_theta % 2 != 0)) {
    bad("problem.n_theta", "must be even and at least 4");
  }
  try {
    c.optimizer.validate();
  } catch (const NehariError& e) {
    // validate() already names the optimizer.* key.
    throw NehariError(ErrorKind::ConfigError, std::string(e.what()).substr(std::string("ConfigError: ").size()));
  }
  if (!(c.l_lo >= 0.0)) bad("experiment.l_lo", "must be non-negative");
  if (!(c.l_hi > c.l_lo)) bad("experiment.l_hi", "must exceed experiment.l_lo");
  if (!(c.bisect_tol > 0.0)) bad("experiment.tol", "must be positive");
  if (!(c.bisect_eps_tol > 0.0)) bad("experiment.eps_tol", "must be positive");
  for (double p : c.p_grid) {
    if (!(p > 1.0)) bad("experiment.p_grid", "every p must exceed 1");
  }
  if (!(c.k_lo >= 0.0)) bad("experiment.k_lo", "must be non-negative");
  if (!(c.k_hi > c.k_lo)) bad("experiment.k_hi", "must exceed experiment.k_lo");
  if (c.seed_kind == SeedKind::File && c.seed_file.empty()) bad("seed.file", "required when seed.kind = file");
}

}  // namespace

EllipticProblem RunConfig::problem() const {
  return preset == "nls" ? preset_nls(omega, lambda, domain) : preset_henon(l, p, domain);
}

std::optional<LinearSolverOptions> RunConfig::linear() const {
  if (lin_tol == 0.0) return std::nullopt;
  LinearSolverOptions o = default_linear_options(domain);
  o.tolerance = lin_tol;
  return o;
}

BisectionOptions RunConfig::bisection() const {
  BisectionOptions o;
  o.domain = domain;
  o.resolution = resolution;
  o.solver = optimizer;
  o.solver.eps_tol = bisect_eps_tol;
  o.tol = bisect_tol;
  o.warm_start = warm_start;
  return o;
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw NehariError(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) bad(key, "unknown key");
    if (seen.count(key) != 0) bad(key, "duplicate key (first on line " + std::to_string(seen[key]) + ")");
    seen[key] = lineno;
    it->second(cfg, key, value);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NehariError(ErrorKind::IoError, "cannot open config '" + path.string() + "'");
  return parse_config(in);
}

}  // namespace nehari::cli
