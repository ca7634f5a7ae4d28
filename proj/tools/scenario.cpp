#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include <kcross/changepoints.hpp>
#include <kcross/errors.hpp>

namespace kcross::cli {

namespace {

using nlohmann::json;

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Walks one JSON object, remembers which keys were read and rejects the rest.
class Section {
 public:
  Section(const json& j, std::string path, const std::string& text, const std::string& source)
      : j_(j), path_(std::move(path)), text_(text), source_(source) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!j_.contains(key)) return fallback;
    return required<T>(key);
  }

  template <class T>
  T required(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(key, "missing required key");
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, "has the wrong type (" + std::string(j_.at(key).type_name()) + ")");
    }
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) fail(key, "missing required section");
    return Section(j_.at(key), join(key), text_, source_);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      (void)v;
      if (!seen_.count(k)) fail(k, "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    std::ostringstream msg;
    msg << source_;
    if (!key.empty()) {
      const auto pos = text_.find('"' + key + '"');
      if (pos != std::string::npos) {
        const auto [line, col] = line_col(text_, pos);
        msg << ':' << line << ':' << col;
      }
    }
    msg << ": " << join(key) << ": " << what;
    throw ConfigError(msg.str());
  }

 private:
  std::string join(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "<root>" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& j_;
  std::string path_;
  const std::string& text_;
  const std::string& source_;
  std::set<std::string> seen_;
};

TruthConfig parse_truth(Section s) {
  TruthConfig t;
  t.kind = s.required<std::string>("kind");
  if (t.kind == "polynomial") {
    t.coefficients = s.required<std::vector<double>>("coefficients");
    if (t.coefficients.empty()) s.fail("coefficients", "must not be empty");
  } else if (t.kind == "sine") {
    t.amplitude = s.get("amplitude", 1.0);
    t.cycles = s.required<double>("cycles");
    t.phase = s.get("phase", 0.0);
  } else if (t.kind == "logistic-bump") {
    t.amplitude = s.get("amplitude", 1.0);
    t.rise = s.required<double>("rise");
    t.fall = s.required<double>("fall");
    t.width = s.required<double>("width");
    if (!(t.width > 0.0)) s.fail("width", "must be positive");
  } else {
    s.fail("kind", "unknown truth '" + t.kind + "' (polynomial, sine, logistic-bump)");
  }
  s.finish();
  return t;
}

DistributionConfig parse_distribution(Section s) {
  DistributionConfig d;
  d.kind = s.get<std::string>("kind", "uniform");
  if (d.kind == "uniform") {
  } else if (d.kind == "linear") {
    d.a = s.required<double>("a");
    d.b = s.required<double>("b");
  } else if (d.kind == "truncated-normal") {
    d.mean = s.required<double>("mean");
    d.sd = s.required<double>("sd");
  } else if (d.kind == "piecewise-linear") {
    d.knot = s.required<double>("knot");
    d.left = s.required<double>("left");
    d.middle = s.required<double>("middle");
    d.right = s.required<double>("right");
  } else {
    s.fail("kind", "unknown distribution '" + d.kind + "'");
  }
  s.finish();
  return d;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source_name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream msg;
    msg << source_name << ':' << line << ':' << col << ": syntax error: " << e.what();
    throw ConfigError(msg.str());
  }

  Section s(root, "", text, source_name);
  Scenario sc;
  sc.name = s.required<std::string>("name");
  if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos)
    s.fail("name", "must be a nonempty plain file name");
  sc.truth = parse_truth(s.child("truth"));
  sc.order = s.required<int>("order");
  if (sc.order < 0 || sc.order > 8) s.fail("order", "must lie in 0..8");
  sc.n = s.required<std::size_t>("n");
  if (sc.n < 2) s.fail("n", "must be at least 2");

  if (!s.has("halfwidth")) s.fail("halfwidth", "missing required key");
  const json& hw = s.raw("halfwidth");
  if (hw.is_number()) {
    sc.halfwidth = {HalfwidthConfig::Mode::fixed, hw.get<double>()};
  } else if (hw.is_string() && hw.get<std::string>() == "pilot") {
    sc.halfwidth = {HalfwidthConfig::Mode::pilot, 0.0};
  } else if (hw.is_object()) {
    Section r(hw, "halfwidth", text, source_name);
    sc.halfwidth = {HalfwidthConfig::Mode::rate, r.required<double>("scale")};
    r.finish();
  } else {
    s.fail("halfwidth", "must be a number, \"pilot\" or {\"scale\": c}");
  }
  sc.pilot_safety = s.get("pilot_safety", 1.0);

  if (s.has("kernel")) {
    const json& kj = s.raw("kernel");
    try {
      if (kj.is_object() && kj.contains("power")) {
        Section k(kj, "kernel", text, source_name);
        sc.kernel = make_power_kernel(sc.order, k.required<int>("power"));
        k.finish();
      } else {
        sc.kernel = kernel_from_json(kj.dump());
      }
    } catch (const ConfigError& e) {
      s.fail("kernel", e.what());
    } catch (const PreconditionError& e) {
      s.fail("kernel", e.what());
    }
    if (sc.kernel->order() != sc.order) s.fail("kernel", "order does not match the scenario order");
  }
  if (s.has("distribution")) sc.distribution = parse_distribution(s.child("distribution"));

  if (s.has("design")) {
    Section d = s.child("design");
    sc.design = d.get<std::string>("kind", "regular");
    if (sc.design != "regular" && sc.design != "random") d.fail("kind", "must be regular or random");
    sc.design_seed = d.get<std::uint64_t>("seed", 1);
    d.finish();
  }
  sc.noise_sd = s.get("noise_sd", 1.0);
  if (!(sc.noise_sd > 0.0)) s.fail("noise_sd", "must be positive");
  sc.reps = s.get<std::size_t>("reps", 0);
  sc.seed = s.get<std::uint64_t>("seed", 1);
  if (s.has("interval")) {
    const auto iv = s.required<std::vector<double>>("interval");
    if (iv.size() != 2 || !(iv[0] < iv[1])) s.fail("interval", "must be [a, b] with a < b");
    sc.interval = std::pair{iv[0], iv[1]};
  }
  sc.grid_size = s.get<std::size_t>("grid_size", 4096);
  if (sc.grid_size < 256 || sc.grid_size % 2) s.fail("grid_size", "must be even and at least 256");
  sc.moments_grid = s.get<std::size_t>("moments_grid", 0);
  if (sc.moments_grid != 0 && sc.moments_grid < 16) s.fail("moments_grid", "must be at least 16");
  if (s.has("change_points")) sc.change_points = s.required<std::vector<double>>("change_points");
  if (s.has("window")) {
    sc.window = s.required<double>("window");
    if (!(*sc.window > 0.0)) s.fail("window", "must be positive");
  }
  if (s.has("corollary")) {
    Section c = s.child("corollary");
    CorollaryConfig cc;
    cc.c = c.get("c", 0.5);
    cc.halfwidth = c.required<double>("halfwidth");
    if (!(cc.c > 0.0 && cc.c < 1.0)) c.fail("c", "must lie in (0, 1)");
    if (!(cc.halfwidth > 0.0)) c.fail("halfwidth", "must be positive");
    c.finish();
    sc.corollary = cc;
  }
  if (s.has("probe")) sc.probe = s.required<double>("probe");
  if (s.has("checks")) {
    sc.checks = s.required<std::vector<std::string>>("checks");
    static const std::set<std::string> known{"crossings", "consistency", "changepoint_excess", "tail_bound",
                                             "corollary"};
    for (const auto& c : sc.checks)
      if (!known.count(c)) s.fail("checks", "unknown check '" + c + "'");
  }
  s.finish();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str(), path.string());
  s.source = path;
  return s;
}

double resolve_halfwidth(const Scenario& s, std::vector<std::string>& warnings) {
  double h = s.halfwidth.value;
  switch (s.halfwidth.mode) {
    case HalfwidthConfig::Mode::fixed:
      break;
    case HalfwidthConfig::Mode::pilot: {
      const PilotHalfwidth p = pilot_halfwidth(s.order, s.n, s.pilot_safety);
      if (p.clamped) warnings.push_back(p.warning);
      h = p.value;
      break;
    }
    case HalfwidthConfig::Mode::rate:
      h = s.halfwidth.value * std::pow(static_cast<double>(s.n), -1.0 / (2 * s.order + 3));
      break;
  }
  if (!(h > 0.0 && h < 0.5)) {
    std::ostringstream msg;
    msg << "halfwidth resolves to " << h << ", outside (0, 1/2)";
    throw ConfigError(msg.str());
  }
  return h;
}

Truth make_truth(const TruthConfig& c) {
  if (c.kind == "polynomial") return Truth::polynomial(c.coefficients);
  if (c.kind == "sine") return Truth::sine(c.amplitude, c.cycles, c.phase);
  if (c.kind == "logistic-bump") return Truth::logistic_bump(c.amplitude, c.rise, c.fall, c.width);
  throw ConfigError("unknown truth '" + c.kind + "'");
}

LimitDistribution make_distribution(const DistributionConfig& c) {
  if (c.kind == "uniform") return LimitDistribution::uniform();
  if (c.kind == "linear") return LimitDistribution::linear_density(c.a, c.b);
  if (c.kind == "truncated-normal") return LimitDistribution::truncated_normal(c.mean, c.sd);
  if (c.kind == "piecewise-linear") return LimitDistribution::piecewise_linear(c.knot, c.left, c.middle, c.right);
  throw ConfigError("unknown distribution '" + c.kind + "'");
}

Model build_model(const Scenario& s) {
  std::vector<std::string> warnings;
  const double h = resolve_halfwidth(s, warnings);
  LimitDistribution dist = make_distribution(s.distribution);
  Design design = s.design == "random" ? random_design(s.n, dist, s.design_seed) : regular_design(s.n, dist);
  SmootherSpec spec = [&] {
    try {
      return s.kernel ? SmootherSpec(s.order, h, *s.kernel, s.noise_sd) : SmootherSpec(s.order, h, s.noise_sd);
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("smoother: ") + e.what());
    }
  }();
  KernelSmoother sm(spec, design);
  Truth truth = make_truth(s.truth);
  if (truth.max_derivative() < s.order + 1)
    throw ConfigError("truth '" + truth.name() + "' does not provide derivative order + 1");
  double a = h, b = 1.0 - h;
  if (s.interval) {
    a = s.interval->first;
    b = s.interval->second;
    if (a < h - 1e-12 || b > 1.0 - h + 1e-12) {
      std::ostringstream msg;
      msg << "interval [" << a << ", " << b << "] leaves the estimation region [" << h << ", " << 1.0 - h << "]";
      throw ConfigError(msg.str());
    }
  }
  return Model{std::move(dist), std::move(design), std::move(spec), std::move(sm), std::move(truth), a, b,
               std::move(warnings)};
}

std::vector<double> resolve_change_points(const Scenario& s, const Model& m) {
  if (s.change_points) return *s.change_points;
  const double h = m.spec.halfwidth();
  return find_derivative_zeros(m.truth, s.order, h, 1.0 - h);
}

}  // namespace kcross::cli
