#include "fogpss/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace fogpss {

namespace {

std::string format_error(const std::string& source, int line, const std::string& key,
                         const std::string& what) {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ':' << line;
  if (!key.empty()) os << ": key '" << key << "'";
  os << ": " << what;
  return os.str();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// [+-]? digits [. digits] [(e|E) [+-]? digits], or with a leading '.'.
bool is_decimal_literal(std::string_view s) {
  std::size_t i = 0;
  auto digits = [&] {
    const std::size_t start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    return i - start;
  };
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t mantissa = digits();
  if (i < s.size() && s[i] == '.') {
    ++i;
    mantissa += digits();
  }
  if (mantissa == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    if (digits() == 0) return false;
  }
  return i == s.size();
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

using Section = std::map<std::string, Entry, std::less<>>;

class Document {
 public:
  Document(std::string_view text, std::string source) : source_(std::move(source)) {
    static const char* kSections[] = {"plant", "reference", "measurement", "controller", "sim", "report"};
    std::string current;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) {
        if (end == text.size()) break;
        continue;
      }
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "", "malformed section header");
        current = std::string(trim(line.substr(1, line.size() - 2)));
        bool known = false;
        for (const char* s : kSections) known = known || current == s;
        if (!known) fail(line_no, "", "unknown section [" + current + "]");
        if (sections_.count(current)) fail(line_no, "", "duplicate section [" + current + "]");
        sections_[current];
        section_lines_[current] = line_no;
      } else {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "", "expected 'key = value'");
        if (current.empty()) fail(line_no, "", "key outside of any section");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty()) fail(line_no, "", "empty key");
        if (value.empty()) fail(line_no, key, "empty value");
        auto& sec = sections_[current];
        if (sec.count(key)) fail(line_no, key, "duplicate key in [" + current + "]");
        sec[key] = Entry{value, line_no, false};
      }
      if (end == text.size()) break;
    }
  }

  [[noreturn]] void fail(int line, const std::string& key, const std::string& what) const {
    throw ConfigError(source_, line, key, what);
  }

  bool has_section(const std::string& s) const { return sections_.count(s) > 0; }

  const Entry* find(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.find(key);
    if (e == s->second.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  const Entry& require(const std::string& section, const std::string& key) {
    if (!has_section(section)) fail(0, "", "missing section [" + section + "]");
    const Entry* e = find(section, key);
    if (!e) fail(section_lines_.at(section), key, "missing required key in [" + section + "]");
    return *e;
  }

  double number(const Entry& e, const std::string& key) const {
    if (!is_decimal_literal(e.value)) fail(e.line, key, "expected a decimal literal, got '" + e.value + "'");
    return parse_double(e.value, e.line, key);
  }

  double parse_double(std::string_view s, int line, const std::string& key) const {
    if (!is_decimal_literal(s)) fail(line, key, "expected a decimal literal, got '" + std::string(s) + "'");
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail(line, key, "number out of range: '" + std::string(s) + "'");
    }
    return v;
  }

  double req_number(const std::string& section, const std::string& key) {
    return number(require(section, key), key);
  }

  std::optional<double> opt_number(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return number(*e, key);
  }

  std::vector<double> numbers(const Entry& e, const std::string& key) const {
    std::vector<double> out;
    for (auto w : words(e.value)) out.push_back(parse_double(w, e.line, key));
    return out;
  }

  /// A list of n numbers, or one number broadcast to all n.
  Eigen::VectorXd vector(const Entry& e, const std::string& key, Eigen::Index n) const {
    const auto v = numbers(e, key);
    if (v.size() == 1) return Eigen::VectorXd::Constant(n, v[0]);
    if (static_cast<Eigen::Index>(v.size()) != n) {
      fail(e.line, key, "expected 1 or " + std::to_string(n) + " numbers, got " + std::to_string(v.size()));
    }
    return Eigen::Map<const Eigen::VectorXd>(v.data(), n);
  }

  CatalogFunction function(std::string_view text, int line, const std::string& key) const {
    const auto w = words(text);
    if (w.empty()) fail(line, key, "expected a catalog function");
    std::vector<double> params;
    for (std::size_t i = 1; i < w.size(); ++i) params.push_back(parse_double(w[i], line, key));
    try {
      return CatalogFunction::parse(w[0], params);
    } catch (const std::invalid_argument& ex) {
      fail(line, key, ex.what());
    }
  }

  CatalogFunction req_function(const std::string& section, const std::string& key) {
    const Entry& e = require(section, key);
    return function(e.value, e.line, key);
  }

  std::vector<CatalogFunction> functions(const std::string& section, const std::string& key,
                                         std::size_t n) {
    const Entry& e = require(section, key);
    const auto parts = split(e.value, ';');
    std::vector<CatalogFunction> out;
    if (parts.size() == 1) {
      out.assign(n, function(parts[0], e.line, key));
    } else if (parts.size() == n) {
      for (auto p : parts) out.push_back(function(p, e.line, key));
    } else {
      fail(e.line, key, "expected 1 or " + std::to_string(n) + " functions separated by ';'");
    }
    return out;
  }

  std::string req_word(const std::string& section, const std::string& key) {
    return require(section, key).value;
  }

  std::optional<bool> opt_bool(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    fail(e->line, key, "expected true or false");
  }

  int line_of(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    return e ? e->line : 0;
  }

  /// Every key must have been consumed.
  void reject_unused() const {
    for (const auto& [name, sec] : sections_) {
      for (const auto& [key, entry] : sec) {
        if (!entry.used) fail(entry.line, key, "unknown key in [" + name + "]");
      }
    }
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, Section, std::less<>> sections_;
  std::map<std::string, int, std::less<>> section_lines_;
};

// Runs a domain constructor, converting its validation error into a
// ConfigError pointing at `line`.
template <typename Fn>
auto checked(Document& doc, int line, const std::string& key, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::invalid_argument& ex) {
    doc.fail(line, key, ex.what());
  }
}

ReportedValues parse_report(Document& doc) {
  ReportedValues r;
  if (!doc.has_section("report")) return r;
  r.beta_hat = doc.opt_number("report", "beta_hat");
  r.entry_time = doc.opt_number("report", "entry_time");
  r.xe_tilde_entry_time = doc.opt_number("report", "xe_tilde_entry_time");
  return r;
}

SimConfig parse_first_order(Document& doc, std::optional<double>& x_abs_bound) {
  const PlantBounds bounds{doc.req_number("plant", "a_lo"), doc.req_number("plant", "a_hi"),
                           doc.req_number("plant", "b_lo"), doc.req_number("plant", "b_hi"),
                           doc.req_number("plant", "d_bar")};
  const double a_p = doc.req_number("plant", "a_p");
  const double b_p = doc.req_number("plant", "b_p");
  const auto dist = doc.req_function("plant", "disturbance");
  FirstOrderPlant plant = checked(doc, doc.line_of("plant", "a_p"), "a_p",
                                  [&] { return FirstOrderPlant(a_p, b_p, dist, bounds); });

  const auto shape = doc.req_function("reference", "x_d");
  const double b1 = doc.req_number("reference", "b1");
  const double b2 = doc.req_number("reference", "b2");
  ReferenceSpec reference = checked(doc, doc.line_of("reference", "x_d"), "x_d",
                                    [&] { return ReferenceSpec(shape, b1, b2); });

  const std::string type = doc.req_word("controller", "type");
  std::optional<double> controller_alpha;
  ControllerSpec controller = OpenLoop{};
  if (type == "fogpss") {
    const double delta = doc.req_number("controller", "delta");
    const double beta_bar = doc.req_number("controller", "beta_bar");
    const double eps0 = doc.req_number("controller", "epsilon0");
    const double alpha = doc.req_number("controller", "alpha");
    controller_alpha = alpha;
    auto u_max = doc.opt_number("controller", "u_max");
    x_abs_bound = doc.opt_number("controller", "x_abs_bound");
    if (!u_max) {
      if (!x_abs_bound) {
        doc.fail(doc.line_of("controller", "type"), "u_max", "give u_max or x_abs_bound");
      }
      u_max = estimate_u_max(bounds, reference, *x_abs_bound);
    }
    controller = checked(doc, doc.line_of("controller", "beta_bar"), "beta_bar",
                         [&] { return FogpssConfig(delta, beta_bar, eps0, alpha, *u_max); });
  } else if (type == "lambda") {
    LambdaTrackerSpec spec;
    spec.k0 = doc.req_number("controller", "k0");
    spec.lambda = doc.req_number("controller", "lambda");
    spec.alpha = doc.req_number("controller", "alpha");
    controller_alpha = spec.alpha;
    if (const Entry* law = doc.find("controller", "law")) {
      spec.law = checked(doc, law->line, "law", [&] { return parse_adaptation_law(law->value); });
    }
    checked(doc, doc.line_of("controller", "lambda"), "lambda",
            [&] { return LambdaTrackerState(spec.k0, spec.lambda, spec.alpha, spec.law); });
    controller = spec;
  } else if (type != "none") {
    doc.fail(doc.line_of("controller", "type"), "type", "unknown controller type '" + type + "'");
  }

  const auto omega = doc.req_function("measurement", "omega");
  const double c1 = doc.req_number("measurement", "c1");
  const double c2 = doc.req_number("measurement", "c2");
  auto meas_alpha = doc.opt_number("measurement", "alpha");
  if (!meas_alpha) meas_alpha = controller_alpha;
  if (!meas_alpha) doc.fail(0, "alpha", "[measurement] needs alpha when the controller has none");
  MeasurementModel measurement = checked(doc, doc.line_of("measurement", "omega"), "omega",
                                         [&] { return MeasurementModel(omega, c1, c2, *meas_alpha); });

  const double h = doc.req_number("sim", "h");
  const double T = doc.req_number("sim", "T");
  const double x0 = doc.req_number("sim", "x0");
  SimConfig sim{h, T, plant, reference, measurement, controller, x0};
  if (const auto seed = doc.opt_number("sim", "seed")) {
    if (*seed < 0 || *seed != std::floor(*seed)) doc.fail(doc.line_of("sim", "seed"), "seed", "seed must be a non-negative integer");
    sim.seed = static_cast<std::uint64_t>(*seed);
  }
  if (const Entry* c = doc.find("sim", "coupling")) {
    if (c->value == "implicit") {
      sim.coupling = Coupling::implicit;
    } else if (c->value == "explicit") {
      sim.coupling = Coupling::explicit_hold;
    } else {
      doc.fail(c->line, "coupling", "expected implicit or explicit");
    }
  }
  if (const auto neg = doc.opt_bool("sim", "negate_u")) sim.negate_u = *neg;
  checked(doc, doc.line_of("sim", "h"), "h", [&] {
    sim.validate();
    return 0;
  });
  return sim;
}

RobotExperimentConfig parse_robot(Document& doc) {
  const Entry& inertia_entry = doc.require("plant", "inertia");
  const auto diag = doc.numbers(inertia_entry, "inertia");
  const auto n = static_cast<Eigen::Index>(diag.size());
  if (n == 0) doc.fail(inertia_entry.line, "inertia", "need one inertia per joint");
  if (const auto joints = doc.opt_number("plant", "joints"); joints && *joints != static_cast<double>(n)) {
    doc.fail(doc.line_of("plant", "joints"), "joints", "joint count does not match the inertia list");
  }
  const Eigen::MatrixXd M = Eigen::Map<const Eigen::VectorXd>(diag.data(), n).asDiagonal();
  const auto sz = static_cast<std::size_t>(n);
  auto dist = doc.functions("plant", "disturbance", sz);
  const Eigen::VectorXd d_bar = doc.vector(doc.require("plant", "d_bar"), "d_bar", n);
  RobotPlant plant = checked(doc, inertia_entry.line, "inertia", [&] { return RobotPlant(M, dist, d_bar); });

  const auto shapes = doc.functions("reference", "q_d", sz);
  const Eigen::VectorXd b1 = doc.vector(doc.require("reference", "b1"), "b1", n);
  const Eigen::VectorXd b2 = doc.vector(doc.require("reference", "b2"), "b2", n);
  std::vector<ReferenceSpec> refs;
  for (std::size_t i = 0; i < sz; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    refs.push_back(checked(doc, doc.line_of("reference", "q_d"), "q_d",
                           [&] { return ReferenceSpec(shapes[i], b1[ii], b2[ii]); }));
  }

  const auto omega = doc.functions("measurement", "omega", sz);
  const Eigen::VectorXd c1 = doc.vector(doc.require("measurement", "c1"), "c1", n);
  const Eigen::VectorXd c2 = doc.vector(doc.require("measurement", "c2"), "c2", n);

  const std::string type = doc.req_word("controller", "type");
  if (type != "pss") doc.fail(doc.line_of("controller", "type"), "type", "robot plants take the pss controller");
  const Eigen::VectorXd b = doc.vector(doc.require("controller", "b"), "b", n);
  const Eigen::VectorXd rho = doc.vector(doc.require("controller", "rho"), "rho", n);
  const double eps = doc.req_number("controller", "epsilon");
  const Eigen::VectorXd u_max = doc.vector(doc.require("controller", "u_max"), "u_max", n);
  PssGains gains = checked(doc, doc.line_of("controller", "b"), "b", [&] { return PssGains(b, rho, eps, u_max); });

  const double h = doc.req_number("sim", "h");
  const double T = doc.req_number("sim", "T");
  const Eigen::VectorXd q0 = doc.vector(doc.require("sim", "q0"), "q0", n);
  Eigen::VectorXd qdot0 = Eigen::VectorXd::Zero(n);
  if (const Entry* e = doc.find("sim", "qdot0")) qdot0 = doc.vector(*e, "qdot0", n);
  RobotExperimentConfig cfg{h, T, plant, refs, omega, c1, c2, gains, q0, qdot0};
  if (const auto neg = doc.opt_bool("sim", "negate_u")) cfg.negate_u = *neg;
  checked(doc, doc.line_of("sim", "h"), "h", [&] {
    cfg.validate();
    return 0;
  });
  return cfg;
}

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& key,
                         const std::string& what)
    : std::runtime_error(format_error(source, line, key, what)), line_(line), key_(key) {}

ExperimentConfig parse_experiment_config(std::string_view text, const std::string& source) {
  Document doc(text, source);
  const std::string type = doc.req_word("plant", "type");
  std::optional<double> x_abs_bound;
  auto experiment = [&]() -> std::variant<SimConfig, RobotExperimentConfig> {
    if (type == "first_order") return parse_first_order(doc, x_abs_bound);
    if (type == "robot") return parse_robot(doc);
    doc.fail(doc.line_of("plant", "type"), "type", "unknown plant type '" + type + "'");
  }();
  ExperimentConfig out{std::move(experiment), source, x_abs_bound, parse_report(doc)};
  doc.reject_unused();
  return out;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_config(buf.str(), path.string());
}

void apply_overrides(ExperimentConfig& config, const ConfigOverrides& o) {
  std::visit(
      [&](auto& exp) {
        if (o.step) exp.h = *o.step;
        if (o.horizon) exp.T = *o.horizon;
        if (o.negate_u) exp.negate_u = !exp.negate_u;
        exp.validate();
      },
      config.experiment);
  if (o.seed) {
    if (auto* sim = std::get_if<SimConfig>(&config.experiment)) sim->seed = *o.seed;
  }
}

std::filesystem::path bundled_config_dir() {
#ifdef FOGPSS_CONFIG_DIR
  return FOGPSS_CONFIG_DIR;
#else
  return "configs";
#endif
}

}  // namespace fogpss
