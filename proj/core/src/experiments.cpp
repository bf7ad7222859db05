#include "kicktop/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <locale>
#include <numbers>
#include <sstream>

#include "kicktop/classical.hpp"
#include "kicktop/csv.hpp"
#include "kicktop/dynamics.hpp"
#include "kicktop/error.hpp"
#include "kicktop/parallel.hpp"

#ifndef KICKTOP_VERSION
#define KICKTOP_VERSION "unknown"
#endif

namespace kicktop {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_plain_number(const std::string& field, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
  return v;
}

// Plain numbers or multiples of pi: "pi", "-pi/2", "2*pi", "3*pi/4".
double parse_real(const std::string& field, const std::string& raw) {
  std::string text = trim(raw);
  const auto pi_at = text.find("pi");
  double v = 0.0;
  if (pi_at == std::string::npos) {
    v = parse_plain_number(field, text);
  } else {
    double sign = 1.0;
    std::string head = trim(std::string_view(text).substr(0, pi_at));
    if (!head.empty() && head.front() == '-') {
      sign = -1.0;
      head = trim(std::string_view(head).substr(1));
    }
    double factor = 1.0;
    if (!head.empty()) {
      if (head.back() != '*') throw ConfigError(field, "malformed multiple of pi '" + text + "'");
      factor = parse_plain_number(field, trim(std::string_view(head).substr(0, head.size() - 1)));
    }
    std::string tail = trim(std::string_view(text).substr(pi_at + 2));
    double divisor = 1.0;
    if (!tail.empty()) {
      if (tail.front() != '/') throw ConfigError(field, "malformed multiple of pi '" + text + "'");
      divisor = parse_plain_number(field, trim(std::string_view(tail).substr(1)));
      if (divisor == 0.0) throw ConfigError(field, "division by zero");
    }
    v = sign * factor * kPi / divisor;
  }
  if (!std::isfinite(v)) throw ConfigError(field, "value must be finite");
  return v;
}

template <typename Int>
Int parse_integer(const std::string& field, const std::string& raw) {
  const std::string text = trim(raw);
  Int v{};
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != end) {
    throw ConfigError(field, "expected an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& field, const std::string& raw) {
  std::string text = trim(raw);
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(field, "expected true or false, got '" + text + "'");
}

std::vector<double> parse_real_list(const std::string& field, const std::string& raw) {
  std::vector<double> out;
  if (trim(raw).empty()) return out;
  for (const std::string& item : split(raw, ',')) out.push_back(parse_real(field, item));
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_exact(v[i]);
  }
  return out;
}

std::vector<StabilityTarget> parse_targets(const std::string& field, const std::string& raw) {
  std::vector<StabilityTarget> out;
  if (trim(raw).empty()) return out;
  for (const std::string& item : split(raw, ';')) {
    std::istringstream words(item);
    std::vector<std::string> parts;
    for (std::string w; words >> w;) parts.push_back(w);
    if (parts.size() != 6) {
      throw ConfigError(field, "target needs 'theta phi period p k_lo k_hi', got '" + item + "'");
    }
    out.push_back({parse_real(field, parts[0]), parse_real(field, parts[1]),
                   parse_integer<int>(field, parts[2]), parse_real(field, parts[3]),
                   parse_real(field, parts[4]), parse_real(field, parts[5])});
  }
  return out;
}

std::string format_targets(const std::vector<StabilityTarget>& targets) {
  std::string out;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const StabilityTarget& t = targets[i];
    if (i) out += "; ";
    out += format_exact(t.theta) + ' ' + format_exact(t.phi) + ' ' + std::to_string(t.period) +
           ' ' + format_exact(t.p) + ' ' + format_exact(t.k_lo) + ' ' + format_exact(t.k_hi);
  }
  return out;
}

std::string normalization_name(QNormalization n) {
  return n == QNormalization::paper_2jplus1 ? "paper_2jplus1" : "qubit_2j";
}

QNormalization parse_normalization(const std::string& field, const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "qubit_2j") return QNormalization::qubit_2j;
  if (text == "paper_2jplus1") return QNormalization::paper_2jplus1;
  throw ConfigError(field, "expected qubit_2j or paper_2jplus1, got '" + text + "'");
}

EntropyUnit parse_unit(const std::string& field, const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "nats") return EntropyUnit::nats;
  if (text == "bits") return EntropyUnit::bits;
  throw ConfigError(field, "expected nats or bits, got '" + text + "'");
}

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string& name, const std::string& value)> set;

  std::string name() const { return section + "." + key; }
};

template <typename Member>
Field real_field(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const ExperimentConfig& c) { return format_exact(c.*member); },
          [member](ExperimentConfig& c, const std::string& n, const std::string& v) {
            c.*member = parse_real(n, v);
          }};
}

template <typename Member>
Field list_field(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const ExperimentConfig& c) { return format_list(c.*member); },
          [member](ExperimentConfig& c, const std::string& n, const std::string& v) {
            c.*member = parse_real_list(n, v);
          }};
}

template <typename Member>
Field int_field(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); },
          [member](ExperimentConfig& c, const std::string& n, const std::string& v) {
            c.*member = parse_integer<std::remove_reference_t<decltype(c.*member)>>(n, v);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    using C = ExperimentConfig;
    std::vector<Field> f;
    f.push_back(list_field("physics", "j", &C::j));
    f.push_back(real_field("physics", "j_min", &C::j_min));
    f.push_back(real_field("physics", "j_max", &C::j_max));
    f.push_back(int_field("physics", "j_count", &C::j_count));
    f.push_back(list_field("physics", "k", &C::k));
    f.push_back(real_field("physics", "k_min", &C::k_min));
    f.push_back(real_field("physics", "k_max", &C::k_max));
    f.push_back(real_field("physics", "k_step", &C::k_step));
    f.push_back(list_field("physics", "p", &C::p));
    f.push_back(list_field("physics", "theta0", &C::theta0));
    f.push_back(list_field("physics", "phi0", &C::phi0));
    f.push_back(int_field("physics", "steps", &C::steps));
    f.push_back({"physics", "normalization",
                 [](const C& c) { return normalization_name(c.normalization); },
                 [](C& c, const std::string& n, const std::string& v) {
                   c.normalization = parse_normalization(n, v);
                 }});
    f.push_back({"physics", "entropy_unit",
                 [](const C& c) {
                   return std::string(c.entropy_unit == EntropyUnit::nats ? "nats" : "bits");
                 },
                 [](C& c, const std::string& n, const std::string& v) {
                   c.entropy_unit = parse_unit(n, v);
                 }});
    f.push_back({"ensemble", "ensemble", [](const C& c) { return to_string(c.ensemble); },
                 [](C& c, const std::string& n, const std::string& v) {
                   try {
                     c.ensemble = ensemble_from_string(trim(v));
                   } catch (const DomainError& e) {
                     throw ConfigError(n, e.what());
                   }
                 }});
    f.push_back(int_field("ensemble", "n_samples", &C::n_samples));
    f.push_back(int_field("ensemble", "n_k_values", &C::n_k_values));
    f.push_back({"ensemble", "parity_resolved",
                 [](const C& c) { return std::string(c.parity_resolved ? "true" : "false"); },
                 [](C& c, const std::string& n, const std::string& v) {
                   c.parity_resolved = parse_bool(n, v);
                 }});
    f.push_back(int_field("classical", "n_seeds", &C::n_seeds));
    f.push_back(int_field("classical", "n_steps", &C::n_steps));
    f.push_back({"classical", "layout",
                 [](const C& c) {
                   return std::string(c.layout == classical::SeedLayout::grid ? "grid" : "random");
                 },
                 [](C& c, const std::string& n, const std::string& v) {
                   const std::string t = trim(v);
                   if (t == "grid") {
                     c.layout = classical::SeedLayout::grid;
                   } else if (t == "random") {
                     c.layout = classical::SeedLayout::random;
                   } else {
                     throw ConfigError(n, "expected grid or random, got '" + t + "'");
                   }
                 }});
    f.push_back(real_field("classical", "dk", &C::dk));
    f.push_back({"classical", "targets", [](const C& c) { return format_targets(c.targets); },
                 [](C& c, const std::string& n, const std::string& v) {
                   c.targets = parse_targets(n, v);
                 }});
    f.push_back(int_field("run", "seed", &C::seed));
    f.push_back(int_field("run", "threads", &C::threads));
    f.push_back({"run", "out", [](const C& c) { return c.out; },
                 [](C& c, const std::string&, const std::string& v) { c.out = trim(v); }});
    return f;
  }();
  return table;
}

const Field& find_field(const std::string& name) {
  for (const Field& f : fields()) {
    if (f.name() == name) return f;
  }
  throw ConfigError(name, "unknown configuration key");
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::portrait:
      return "portrait";
    case ExperimentKind::sweep_k:
      return "sweep-k";
    case ExperimentKind::scaling_j:
      return "scaling-j";
    case ExperimentKind::table1:
      return "table1";
    case ExperimentKind::coe_compare:
      return "coe-compare";
    case ExperimentKind::eigvec_q:
      return "eigvec-q";
    case ExperimentKind::stability_scan:
      return "stability-scan";
  }
  return "unknown";
}

std::optional<ExperimentKind> experiment_from_string(std::string_view name) {
  for (const ExperimentInfo& info : list_experiments()) {
    if (info.name == name) return info.kind;
  }
  return std::nullopt;
}

const std::vector<ExperimentInfo>& list_experiments() {
  static const std::vector<ExperimentInfo> table = {
      {ExperimentKind::portrait, "portrait", "Figs. 1, 2, 7",
       "classical phase portraits of the kicked-top map"},
      {ExperimentKind::sweep_k, "sweep-k", "Figs. 3, 4",
       "time-averaged D, DG, Q against k across the period-doubling threshold"},
      {ExperimentKind::scaling_j, "scaling-j", "Figs. 6, 8, 9",
       "time-averaged correlations against j with power-law fits"},
      {ExperimentKind::table1, "table1", "Table 1 & Fig. 5",
       "Floquet and block-COE time averages at k = 10, p = 1.7"},
      {ExperimentKind::coe_compare, "coe-compare", "Table 1 (COE columns)",
       "multi-sample block and full COE averages against the Floquet top"},
      {ExperimentKind::eigvec_q, "eigvec-q", "Fig. 10",
       "mean Q of COE and Floquet eigenvectors against the exact ensemble mean"},
      {ExperimentKind::stability_scan, "stability-scan", "Figs. 3, 4 (classical thresholds)",
       "kick strengths at which classical periodic orbits lose stability"},
  };
  return table;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.theta0 = {kPi / 2};
  c.phi0 = {-kPi / 2};
  switch (kind) {
    case ExperimentKind::portrait:
      c.p = {kPi / 2};
      c.k = {1.0, 2.0, 3.0, 6.0};
      break;
    case ExperimentKind::sweep_k:
      c.j = {120};
      c.p = {kPi / 2, 1.7};
      c.k_min = 0.1;
      c.k_max = 4.0;
      c.k_step = 0.05;
      c.steps = 1000;
      break;
    case ExperimentKind::scaling_j:
      c.k = {2.0};
      c.p = {kPi / 2};
      c.theta0 = {kPi / 2, kPi / 2};
      c.phi0 = {-kPi / 2, kPi / 2};
      c.j_min = 10;
      c.j_max = 400;
      c.j_count = 20;
      c.steps = 500;
      break;
    case ExperimentKind::table1:
      c.j = {50, 120};
      c.k = {10.0};
      c.p = {1.7};
      c.steps = 1000;
      c.n_samples = 1;
      break;
    case ExperimentKind::coe_compare:
      c.j = {10, 20, 50, 120};
      c.k = {10.0};
      c.p = {1.7};
      c.steps = 1000;
      c.n_samples = 10;
      break;
    case ExperimentKind::eigvec_q:
      c.j = {1, 2, 3, 5, 7, 10, 15, 20, 25, 30, 40, 50};
      c.p = {1.7};
      c.k_min = 10;
      c.k_max = 1000;
      c.n_samples = 100;
      c.n_k_values = 50;
      c.normalization = QNormalization::paper_2jplus1;
      break;
    case ExperimentKind::stability_scan: {
      const double h = kPi / 2;
      c.targets = {{h, -h, 1, h, 0.1, 3.0},
                   {h, -h, 1, 1.7, 0.1, 3.0},
                   {h, h, 1, 1.7, 0.1, 3.0},
                   {kPi / 4, kPi, 1, h, 4.0, 5.0}};
      break;
    }
  }
  return c;
}

void apply_override(ExperimentConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(trim(assignment), "override must look like section.key=value");
  }
  const std::string name = trim(assignment.substr(0, eq));
  if (name == "experiment.name") throw ConfigError(name, "select the experiment on the command line");
  const Field& f = find_field(name);
  f.set(config, name, std::string(assignment.substr(eq + 1)));
}

void apply_environment(ExperimentConfig& config, const std::map<std::string, std::string>& env) {
  for (const Field& f : fields()) {
    const auto it = env.find("KICKTOP_" + upper(f.section) + "_" + upper(f.key));
    if (it != env.end()) f.set(config, f.name(), it->second);
  }
}

ExperimentConfig parse_config(std::string_view text, std::optional<ExperimentKind> kind) {
  struct Entry {
    std::string name;
    std::string value;
  };
  std::vector<Entry> entries;
  std::string section;
  std::istringstream lines{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(lines, line);) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no), "unterminated section header");
      }
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    }
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(line_no), "key outside of a [section]");
    }
    entries.push_back({section + "." + trim(std::string_view(body).substr(0, eq)),
                       trim(std::string_view(body).substr(eq + 1))});
  }

  std::optional<ExperimentKind> named;
  for (const Entry& e : entries) {
    if (e.name != "experiment.name") continue;
    named = experiment_from_string(e.value);
    if (!named) throw ConfigError(e.name, "unknown experiment '" + e.value + "'");
  }
  if (kind && named && *kind != *named) {
    throw ConfigError("experiment.name", "file configures '" + to_string(*named) +
                                             "' but '" + to_string(*kind) + "' was requested");
  }
  if (!kind && !named) throw ConfigError("experiment.name", "no experiment selected");

  ExperimentConfig config = default_config(kind ? *kind : *named);
  for (const Entry& e : entries) {
    if (e.name == "experiment.name") continue;
    find_field(e.name).set(config, e.name, e.value);
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& file, std::optional<ExperimentKind> kind) {
  std::ifstream in(file);
  if (!in) throw ConfigError("--config", "cannot read " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), kind);
}

std::string serialize(const ExperimentConfig& config) {
  std::string out = "[experiment]\nname = " + to_string(config.experiment) + "\n";
  std::string section;
  for (const Field& f : fields()) {
    if (f.section != section) {
      section = f.section;
      out += "\n[" + section + "]\n";
    }
    out += f.key + " = " + f.get(config) + "\n";
  }
  return out;
}

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

void require_spins(const std::vector<double>& js, double minimum) {
  require(!js.empty(), "physics.j", "at least one value is required");
  for (double j : js) {
    try {
      SpinQuantumNumber::from_j(j);
    } catch (const DomainError&) {
      throw ConfigError("physics.j", "value " + format_exact(j) + " is not a positive half-integer");
    }
    require(j >= minimum, "physics.j", "must be >= " + format_exact(minimum));
  }
}

void require_count(const std::vector<double>& v, const std::string& field, bool exactly_one) {
  require(!v.empty(), field, "at least one value is required");
  if (exactly_one) require(v.size() == 1, field, "exactly one value is required");
}

void require_starts(const ExperimentConfig& c, bool exactly_one) {
  require_count(c.theta0, "physics.theta0", exactly_one);
  require(c.theta0.size() == c.phi0.size(), "physics.phi0", "needs as many values as theta0");
  for (double t : c.theta0) require(t >= 0.0 && t <= kPi, "physics.theta0", "must lie in [0, pi]");
  for (double f : c.phi0) {
    require(f > -kPi && f <= kPi, "physics.phi0", "must lie in (-pi, pi]");
  }
}

std::vector<double> k_grid(const ExperimentConfig& c) {
  std::vector<double> out;
  if (!(c.k_step > 0.0) || c.k_max < c.k_min) return out;
  const auto n = static_cast<long>(std::floor((c.k_max - c.k_min) / c.k_step + 1e-9)) + 1;
  for (long i = 0; i < n; ++i) out.push_back(c.k_min + static_cast<double>(i) * c.k_step);
  return out;
}

}  // namespace

void validate(const ExperimentConfig& c) {
  require(c.threads >= 1, "run.threads", "must be >= 1");
  require(!c.out.empty(), "run.out", "output directory must be given");
  for (const auto* list : {&c.k, &c.p}) {
    for (double v : *list) require(std::isfinite(v), list == &c.k ? "physics.k" : "physics.p", "must be finite");
  }
  const bool quantum = c.experiment != ExperimentKind::portrait &&
                       c.experiment != ExperimentKind::stability_scan &&
                       c.experiment != ExperimentKind::eigvec_q;
  if (quantum) require(c.steps >= 1, "physics.steps", "must be >= 1");

  switch (c.experiment) {
    case ExperimentKind::portrait:
      require_count(c.k, "physics.k", false);
      require_count(c.p, "physics.p", false);
      require(c.n_seeds >= 1, "classical.n_seeds", "must be >= 1");
      require(c.n_steps >= 0, "classical.n_steps", "must be >= 0");
      break;
    case ExperimentKind::sweep_k:
      require_spins(c.j, 1.0);
      require(c.j.size() == 1, "physics.j", "exactly one value is required");
      require_count(c.p, "physics.p", false);
      require_starts(c, true);
      require(c.k_step > 0.0, "physics.k_step", "must be > 0");
      require(k_grid(c).size() >= 2, "physics.k_max", "k grid must hold at least two points");
      break;
    case ExperimentKind::scaling_j: {
      require_count(c.k, "physics.k", true);
      require_count(c.p, "physics.p", true);
      require_starts(c, false);
      require(c.j_min >= 1.0, "physics.j_min", "must be >= 1");
      require(c.j_max >= c.j_min, "physics.j_max", "must be >= j_min");
      require(c.j_count >= 5, "physics.j_count", "power-law fits need at least 5 values");
      require(log_spaced_spins(c.j_min, c.j_max, c.j_count).size() >= 5, "physics.j_count",
              "fewer than 5 distinct j values in [j_min, j_max]");
      break;
    }
    case ExperimentKind::table1:
    case ExperimentKind::coe_compare:
      require_spins(c.j, 1.0);
      require_count(c.k, "physics.k", true);
      require_count(c.p, "physics.p", true);
      require_starts(c, true);
      require(c.n_samples >= 1, "ensemble.n_samples", "must be >= 1");
      require(c.ensemble != Ensemble::haar_sphere_real, "ensemble.ensemble",
              "time averages need block_coe or full_coe");
      break;
    case ExperimentKind::eigvec_q:
      require_spins(c.j, 0.5);
      require_count(c.p, "physics.p", true);
      require(c.n_samples >= 1, "ensemble.n_samples", "must be >= 1");
      require(c.n_k_values >= 1, "ensemble.n_k_values", "must be >= 1");
      require(c.k_max >= c.k_min, "physics.k_max", "must be >= k_min");
      break;
    case ExperimentKind::stability_scan:
      require(!c.targets.empty(), "classical.targets", "at least one target is required");
      require(c.dk > 0.0, "classical.dk", "must be > 0");
      for (const StabilityTarget& t : c.targets) {
        require(t.theta > 0.0 && t.theta < kPi, "classical.targets", "theta must lie in (0, pi)");
        require(std::isfinite(t.phi) && std::isfinite(t.p), "classical.targets", "must be finite");
        require(t.period >= 1, "classical.targets", "period must be >= 1");
        require(t.k_hi > t.k_lo, "classical.targets", "k_hi must exceed k_lo");
      }
      break;
  }
}

namespace {

using csv::format_number;
using Outputs = std::vector<std::pair<std::string, std::string>>;

std::ostringstream stream() {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  return out;
}

void add_measure_rows(std::ostream& out, const std::string& prefix, const TimeAverage& a) {
  out << prefix << "D," << format_number(a.discord.mean) << ',' << format_number(a.discord.std)
      << '\n'
      << prefix << "DG," << format_number(a.geometric_discord.mean) << ','
      << format_number(a.geometric_discord.std) << '\n'
      << prefix << "Q," << format_number(a.q_measure.mean) << ',' << format_number(a.q_measure.std)
      << '\n';
}

Outputs run_portrait(const ExperimentConfig& c) {
  Outputs outputs;
  auto plot = stream();
  plot << "p,k,orbit_id,step,theta,phi\n";
  int index = 0;
  for (double p : c.p) {
    for (double k : c.k) {
      const auto orbits =
          classical::phase_portrait({k, p}, c.n_seeds, c.n_steps, c.layout, c.seed);
      auto out = stream();
      classical::write_portrait_csv(out, orbits);
      outputs.emplace_back("portrait_" + std::to_string(index++) + ".csv", out.str());
      for (std::size_t o = 0; o < orbits.size(); ++o) {
        for (std::size_t s = 0; s < orbits[o].points.size(); ++s) {
          const auto& pt = orbits[o].points[s];
          plot << format_number(p) << ',' << format_number(k) << ',' << o << ',' << s << ','
               << format_number(pt.theta()) << ',' << format_number(pt.phi()) << '\n';
        }
      }
    }
  }
  outputs.emplace_back("portrait_plot.csv", plot.str());
  return outputs;
}

double classical_threshold(double theta, double phi, double p, double k_lo, double k_hi,
                           double dk) {
  try {
    return classical::stability_scan(classical::ClassicalPoint::from_angles(theta, phi), 1, p,
                                     {k_lo, k_hi}, dk);
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

Outputs run_sweep_k(const ExperimentConfig& c) {
  const SpinQuantumNumber spin = SpinQuantumNumber::from_j(c.j.front());
  const std::vector<double> grid = k_grid(c);
  auto results = stream();
  auto jumps = stream();
  auto plot = stream();
  jumps << "p,k_jump,k_b_classical\n";
  plot << "p,k,measure,mean,std\n";
  bool header = true;
  for (double p : c.p) {
    const SweepRecord sweep = sweep_k(spin, p, c.theta0.front(), c.phi0.front(), grid, c.steps,
                                      c.threads, c.normalization, c.entropy_unit);
    auto body = stream();
    write_sweep_csv(body, sweep);
    std::string text = body.str();
    if (!header) text.erase(0, text.find('\n') + 1);
    header = false;
    results << text;
    const auto jump = locate_jump(sweep);
    jumps << format_number(p) << ','
          << format_number(jump ? *jump : std::numeric_limits<double>::quiet_NaN()) << ','
          << format_number(classical_threshold(c.theta0.front(), c.phi0.front(), p, grid.front(),
                                               grid.back(), c.dk))
          << '\n';
    for (const SweepPoint& pt : sweep.points) {
      add_measure_rows(plot, format_number(p) + ',' + format_number(pt.k) + ',', pt.average);
    }
  }
  return {{"sweep_k.csv", results.str()}, {"jumps.csv", jumps.str()},
          {"sweep_k_plot.csv", plot.str()}};
}

Outputs run_scaling_j(const ExperimentConfig& c) {
  const auto spins = log_spaced_spins(c.j_min, c.j_max, c.j_count);
  auto results = stream();
  auto fits = stream();
  auto plot = stream();
  fits << "theta0,phi0,measure,mu,stderr_mu,log_prefactor,points\n";
  plot << "theta0,phi0,j,measure,mean,std\n";
  for (std::size_t s = 0; s < c.theta0.size(); ++s) {
    const double theta = c.theta0[s];
    const double phi = c.phi0[s];
    const SweepRecord sweep = sweep_j(c.k.front(), c.p.front(), theta, phi, spins, c.steps,
                                      c.threads, c.normalization, c.entropy_unit);
    auto body = stream();
    write_sweep_csv(body, sweep);
    std::string text = body.str();
    if (s > 0) text.erase(0, text.find('\n') + 1);
    results << text;
    const std::string prefix = format_number(theta) + ',' + format_number(phi) + ',';
    const PowerLawFits f = power_law_fit(sweep, 0.0);
    for (const auto& [name, fit] : {std::pair{"D", f.discord}, std::pair{"DG", f.geometric_discord},
                                    std::pair{"Q", f.q_measure}}) {
      fits << prefix << name << ',' << format_number(fit.mu) << ',' << format_number(fit.stderr_mu)
           << ',' << format_number(fit.log_prefactor) << ',' << fit.points << '\n';
    }
    for (const SweepPoint& pt : sweep.points) {
      add_measure_rows(plot, prefix + format_number(pt.j) + ',', pt.average);
    }
  }
  return {{"scaling_j.csv", results.str()}, {"fits.csv", fits.str()},
          {"scaling_j_plot.csv", plot.str()}};
}

struct FloquetRun {
  CorrelationTimeSeries series;
  TimeAverage average;
};

std::vector<FloquetRun> floquet_runs(const ExperimentConfig& c) {
  std::vector<FloquetRun> runs(c.j.size());
  parallel_for(c.j.size(), c.threads, [&](std::size_t i) {
    const SpinQuantumNumber spin = SpinQuantumNumber::from_j(c.j[i]);
    const JyEigensystem jy(spin);
    const FloquetOperator u(jy, c.k.front(), c.p.front());
    TrajectoryMetadata meta{spin.j(),          c.k.front(), c.p.front(),  c.theta0.front(),
                            c.phi0.front(),    c.steps,     c.normalization, c.entropy_unit};
    runs[i].series =
        correlation_time_series(coherent_state(jy, c.theta0.front(), c.phi0.front()), u, c.steps, meta);
    runs[i].average = summarize(runs[i].series);
  });
  return runs;
}

std::string floquet_csv(const ExperimentConfig& c, const std::vector<FloquetRun>& runs) {
  SweepRecord record{SweepAxis::j, c.p.front(), c.theta0.front(), c.phi0.front(), c.steps, {}};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    record.points.push_back({c.j[i], c.j[i], c.k.front(), runs[i].average});
  }
  auto out = stream();
  write_sweep_csv(out, record);
  return out.str();
}

EnsembleRow ensemble_row(const ExperimentConfig& c, double j, Ensemble ensemble) {
  const SpinQuantumNumber spin = SpinQuantumNumber::from_j(j);
  const EnsembleSpec spec{spin, c.n_samples, c.seed, ensemble};
  const EnsembleAverage avg = coe_time_average(spec, c.theta0.front(), c.phi0.front(), c.steps,
                                               c.threads, c.normalization, c.entropy_unit);
  return {j,
          ensemble,
          c.n_samples,
          c.seed,
          avg.pooled.discord.mean,
          avg.pooled.geometric_discord.mean,
          avg.pooled.q_measure.mean,
          analytic_q_average(spin, c.normalization),
          avg.stderr_mean.discord,
          avg.stderr_mean.geometric_discord,
          avg.stderr_mean.q_measure};
}

Outputs run_table1(const ExperimentConfig& c) {
  const std::vector<FloquetRun> runs = floquet_runs(c);
  std::vector<EnsembleRow> rows;
  for (double j : c.j) rows.push_back(ensemble_row(c, j, c.ensemble));
  auto coe = stream();
  write_ensemble_csv(coe, rows);

  std::vector<CorrelationTimeSeries> series;
  for (const FloquetRun& r : runs) series.push_back(r.series);
  const LinearFit fit = pooled_discord_relation(series);
  auto relation = stream();
  relation << "slope,stderr_slope,intercept,stderr_intercept,points\n"
           << format_number(fit.slope) << ',' << format_number(fit.stderr_slope) << ','
           << format_number(fit.intercept) << ',' << format_number(fit.stderr_intercept) << ','
           << fit.points << '\n';

  auto plot = stream();
  plot << "j,source,t,measure,value\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string j = format_number(c.j[i]);
    for (const CorrelationRecord& r : runs[i].series.records) {
      const std::string prefix = j + ",floquet," + std::to_string(r.t) + ',';
      plot << prefix << "D," << format_number(r.values.discord) << '\n'
           << prefix << "DG," << format_number(r.values.geometric_discord) << '\n'
           << prefix << "Q," << format_number(r.values.q_measure) << '\n';
    }
    const std::string prefix = j + ",coe_mean,0,";
    plot << prefix << "D," << format_number(rows[i].d_mean) << '\n'
         << prefix << "DG," << format_number(rows[i].dg_mean) << '\n'
         << prefix << "Q," << format_number(rows[i].q_mean) << '\n';
  }
  return {{"table1_floquet.csv", floquet_csv(c, runs)},
          {"table1_coe.csv", coe.str()},
          {"relation.csv", relation.str()},
          {"table1_plot.csv", plot.str()}};
}

Outputs run_coe_compare(const ExperimentConfig& c) {
  const std::vector<FloquetRun> runs = floquet_runs(c);
  std::vector<EnsembleRow> rows;
  for (double j : c.j) {
    rows.push_back(ensemble_row(c, j, Ensemble::block_coe));
    rows.push_back(ensemble_row(c, j, Ensemble::full_coe));
  }
  auto coe = stream();
  write_ensemble_csv(coe, rows);
  auto plot = stream();
  plot << "j,source,measure,value,stderr\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string j = format_number(c.j[i]);
    const TimeAverage& a = runs[i].average;
    plot << j << ",floquet,D," << format_number(a.discord.mean) << ",0\n"
         << j << ",floquet,DG," << format_number(a.geometric_discord.mean) << ",0\n"
         << j << ",floquet,Q," << format_number(a.q_measure.mean) << ",0\n";
  }
  for (const EnsembleRow& r : rows) {
    const std::string prefix = format_number(r.j) + ',' + to_string(r.ensemble) + ',';
    plot << prefix << "D," << format_number(r.d_mean) << ',' << format_number(r.stderr_d) << '\n'
         << prefix << "DG," << format_number(r.dg_mean) << ',' << format_number(r.stderr_dg) << '\n'
         << prefix << "Q," << format_number(r.q_mean) << ',' << format_number(r.stderr_q) << '\n';
  }
  return {{"coe_compare_floquet.csv", floquet_csv(c, runs)},
          {"coe_compare.csv", coe.str()},
          {"coe_compare_plot.csv", plot.str()}};
}

Outputs run_eigvec_q(const ExperimentConfig& c) {
  auto results = stream();
  auto plot = stream();
  results << "j,source,parity_resolved,n_matrices,n_vectors,Q_mean,stderr_Q,Q_analytic\n";
  plot << "j,source,measure,value,stderr\n";
  for (double j : c.j) {
    const SpinQuantumNumber spin = SpinQuantumNumber::from_j(j);
    for (EigenvectorSource source :
         {EigenvectorSource::coe_samples, EigenvectorSource::floquet_k_range}) {
      const bool floquet = source == EigenvectorSource::floquet_k_range;
      EigenvectorQSpec spec{spin,         source,   floquet ? c.n_k_values : c.n_samples,
                            c.seed,       c.parity_resolved, c.k_min, c.k_max, c.p.front(),
                            c.normalization};
      const EigenvectorQStats s = eigenvector_q_statistics(spec, c.threads);
      const std::string name = floquet ? "floquet" : "coe";
      results << format_number(j) << ',' << name << ',' << (c.parity_resolved ? "true" : "false")
              << ',' << s.n_matrices << ',' << s.n_vectors << ',' << format_number(s.mean) << ','
              << format_number(s.stderr_mean) << ',' << format_number(s.analytic) << '\n';
      plot << format_number(j) << ',' << name << ",Q," << format_number(s.mean) << ','
           << format_number(s.stderr_mean) << '\n';
    }
    plot << format_number(j) << ",analytic,Q," << format_number(analytic_q_average(spin, c.normalization))
         << ",0\n";
  }
  return {{"eigvec_q.csv", results.str()}, {"eigvec_q_plot.csv", plot.str()}};
}

Outputs run_stability_scan(const ExperimentConfig& c) {
  auto results = stream();
  results << "theta0,phi0,period,p,k_lo,k_hi,k_b,status\n";
  for (const StabilityTarget& t : c.targets) {
    double kb = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
    try {
      kb = classical::stability_scan(classical::ClassicalPoint::from_angles(t.theta, t.phi),
                                     t.period, t.p, {t.k_lo, t.k_hi}, c.dk);
    } catch (const NumericalError& e) {
      status = e.what();
    }
    results << format_number(t.theta) << ',' << format_number(t.phi) << ',' << t.period << ','
            << format_number(t.p) << ',' << format_number(t.k_lo) << ',' << format_number(t.k_hi)
            << ',' << format_number(kb) << ',' << status << '\n';
  }
  return {{"stability.csv", results.str()}};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string version() { return KICKTOP_VERSION; }

RunResult run(const ExperimentConfig& config) {
  validate(config);
  Outputs outputs;
  try {
    switch (config.experiment) {
      case ExperimentKind::portrait:
        outputs = run_portrait(config);
        break;
      case ExperimentKind::sweep_k:
        outputs = run_sweep_k(config);
        break;
      case ExperimentKind::scaling_j:
        outputs = run_scaling_j(config);
        break;
      case ExperimentKind::table1:
        outputs = run_table1(config);
        break;
      case ExperimentKind::coe_compare:
        outputs = run_coe_compare(config);
        break;
      case ExperimentKind::eigvec_q:
        outputs = run_eigvec_q(config);
        break;
      case ExperimentKind::stability_scan:
        outputs = run_stability_scan(config);
        break;
    }
  } catch (const NumericalError& e) {
    throw NumericalError(to_string(config.experiment) + ": " + e.what());
  }

  std::string manifest = "# kicktop run manifest\n";
  manifest += "version = " + version() + "\n";
  manifest += "timestamp = " + utc_timestamp() + "\n";
  manifest += "seed = " + std::to_string(config.seed) + "\n";
  manifest += "threads = " + std::to_string(config.threads) + "\n";
  manifest += "files = ";
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    manifest += (i ? ", " : "") + outputs[i].first;
  }
  manifest += "\n\n" + serialize(config);
  outputs.emplace_back("manifest.txt", manifest);

  const std::filesystem::path dir(config.out);
  std::filesystem::create_directories(dir);
  RunResult result;
  for (const auto& [name, body] : outputs) {
    const std::filesystem::path file = dir / name;
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) throw std::runtime_error("cannot write " + file.string());
    result.files.push_back(file);
  }
  return result;
}

}  // namespace kicktop
