#include "confbound_cli/config.hpp"

#include "confbound/harmonics.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace confbound::cli {

namespace {

using nlohmann::json;

std::string type_name(const json& v) { return v.type_name(); }

// Strict view of one JSON object: every key must be read before finish().
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) {
      throw ConfigError(path_ + ": expected an object, got " + type_name(obj_));
    }
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }

  void read(const std::string& key, int& out, long lo, long hi) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) {
        throw ConfigError(at(key) + ": expected an integer, got " + type_name(*v));
      }
      const auto value = v->get<long long>();
      if (value < lo || value > hi) {
        throw ConfigError(at(key) + ": " + std::to_string(value) + " outside [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
      }
      out = static_cast<int>(value);
    }
  }

  void read(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
        throw ConfigError(at(key) + ": expected a non-negative integer, got " + v->dump());
      }
      out = v->get<std::uint64_t>();
    }
  }

  void read(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      out = number(*v, at(key));
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) {
        throw ConfigError(at(key) + ": expected a string, got " + type_name(*v));
      }
      out = v->get<std::string>();
    }
  }

  void read(const std::string& key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      out = numbers(*v, at(key));
    }
  }

  static double number(const json& v, const std::string& where) {
    if (!v.is_number()) {
      throw ConfigError(where + ": expected a number, got " + type_name(v));
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      throw ConfigError(where + ": value is not finite");
    }
    return x;
  }

  static std::vector<double> numbers(const json& v, const std::string& where) {
    if (!v.is_array()) {
      throw ConfigError(where + ": expected an array of numbers, got " + type_name(v));
    }
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) {
        throw ConfigError(path_ + ": unknown key \"" + item.key() + "\"");
      }
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
void section(Reader& parent, const std::string& key, F&& body) {
  if (const json* v = parent.find(key)) {
    Reader r(*v, parent.at(key));
    body(r);
    r.finish();
  }
}

MetricSpec parse_metric(const json& doc, const std::string& where) {
  Reader r(doc, where);
  std::string type;
  r.read("type", type);
  if (!r.has("type")) {
    throw ConfigError(where + ": missing \"type\"");
  }
  MetricSpec spec;
  r.read("label", spec.label);
  if (type == "round") {
    spec.kind = MetricSpec::Kind::round;
  } else if (type == "constant") {
    spec.kind = MetricSpec::Kind::constant;
    r.read("value", spec.shift);
  } else if (type == "harmonic") {
    spec.kind = MetricSpec::Kind::harmonic;
    r.read("coeffs", spec.coeffs);
    if (spec.coeffs.empty()) {
      throw ConfigError(where + ": harmonic metric needs a non-empty \"coeffs\" array");
    }
  } else if (type == "nodal") {
    spec.kind = MetricSpec::Kind::nodal;
    r.read("values", spec.values);
    if (spec.values.empty()) {
      throw ConfigError(where + ": nodal metric needs a non-empty \"values\" array");
    }
  } else if (type == "two_bubble") {
    spec.kind = MetricSpec::Kind::two_bubble;
    if (const json* s = r.find("s")) {
      spec.s = s->is_array() ? Reader::numbers(*s, r.at("s")) : std::vector<double>{Reader::number(*s, r.at("s"))};
    }
    if (spec.s.empty()) {
      throw ConfigError(where + ": two_bubble metric needs \"s\"");
    }
    for (double s : spec.s) {
      if (s < 0.0) {
        throw ConfigError(r.at("s") + ": concentration parameters must be non-negative");
      }
    }
    r.read("axis", spec.axis);
  } else if (type == "random") {
    spec.kind = MetricSpec::Kind::random;
    r.read("count", spec.count, 1, 100000);
    r.read("degree", spec.degree, 0, 12);
    r.read("amplitude", spec.amplitude);
    if (r.has("seed")) {
      std::uint64_t seed = 0;
      r.read("seed", seed);
      spec.seed = seed;
    }
    if (spec.amplitude < 0.0) {
      throw ConfigError(r.at("amplitude") + ": must be non-negative");
    }
  } else {
    throw ConfigError(where + ".type: unknown metric type \"" + type +
                      "\" (expected round, constant, harmonic, nodal, two_bubble or random)");
  }
  r.finish();
  return spec;
}

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw ConfigError(message);
  }
}

}  // namespace

void validate(const ExperimentConfig& c) {
  require(c.m == 2 || c.m == 3, "m: only 2 and 3 are supported");
  require(c.level >= 0 && c.level <= (c.m == 2 ? 8 : 6), "level: outside the supported range for this m");
  require(c.workers >= 0, "workers: must be non-negative");
  require(c.slack < 1.0, "slack: must be below 1 (negative selects the default)");
  require(!c.metrics.empty(), "metrics: at least one metric is required");
  require(c.solver.count >= 3, "solver.count: at least 3");
  require(c.solver.tol > 0.0, "solver.tol: must be positive");
  require(c.solver.max_iterations >= 1, "solver.max_iterations: must be positive");
  require(c.solver.dense_threshold >= 0, "solver.dense_threshold: must be non-negative");
  require(c.geometry.samples >= 1, "geometry.samples: must be positive");
  require(c.geometry.tol > 0.0, "geometry.tol: must be positive");
  require(c.geometry.radius > 0.0 && c.geometry.radius <= kMaxBallRadius, "geometry.radius: must lie in (0, 1)");
  require(c.center.tol > 0.0, "center.tol: must be positive");
  require(c.center.max_iterations >= 1, "center.max_iterations: must be positive");
  for (const auto& stop : c.center.path) {
    require(static_cast<int>(stop.p.size()) == c.m + 1, "center.path: every p needs m+1 coordinates");
    require(stop.t >= 0.0 && stop.t <= 1.0, "center.path: t must lie in [0, 1]");
  }
  require(c.grid.points >= 1, "grid.points: must be positive");
  require(c.grid.t_steps >= 2, "grid.t_steps: at least 2");
  require(c.grid.tol > 0.0, "grid.tol: must be positive");
  require(c.grid.candidates >= 1, "grid.candidates: must be positive");
  require(c.grid.max_refine_iterations >= 0, "grid.max_refine_iterations: must be non-negative");
  require(c.grid.zero_threshold >= 0.0, "grid.zero_threshold: must be non-negative");
  require(c.degree.level >= 0 && c.degree.max_level >= c.degree.level && c.degree.max_level <= 7,
          "degree: need 0 <= level <= max_level <= 7");
  require(c.optimize.degree >= 1, "optimize.degree: must be at least 1");
  require(c.optimize.budget >= 1, "optimize.budget: must be positive");
  require(c.optimize.initial_step > 0.0 && c.optimize.min_step > 0.0, "optimize: steps must be positive");
  require(!c.out.empty(), "out: output directory must not be empty");
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  Reader r(doc, "config");
  r.read("m", c.m, 2, 3);
  r.read("level", c.level, 0, 8);
  r.read("seed", c.seed);
  r.read("workers", c.workers, 0, 4096);
  r.read("slack", c.slack);
  std::string out;
  r.read("out", out);
  if (r.has("out")) {
    c.out = out;
  }
  if (const json* list = r.find("metrics")) {
    if (!list->is_array()) {
      throw ConfigError("config.metrics: expected an array, got " + type_name(*list));
    }
    c.metrics.clear();
    for (std::size_t i = 0; i < list->size(); ++i) {
      c.metrics.push_back(parse_metric((*list)[i], "config.metrics[" + std::to_string(i) + "]"));
    }
  }
  section(r, "solver", [&](Reader& s) {
    s.read("count", c.solver.count, 3, 1000);
    s.read("tol", c.solver.tol);
    s.read("max_iterations", c.solver.max_iterations, 1, 1000000);
    int dense = static_cast<int>(c.solver.dense_threshold);
    s.read("dense_threshold", dense, 0, 1000000);
    c.solver.dense_threshold = dense;
  });
  section(r, "geometry", [&](Reader& s) {
    s.read("samples", c.geometry.samples, 1, 100000000);
    s.read("tol", c.geometry.tol);
    s.read("radius", c.geometry.radius);
  });
  section(r, "center", [&](Reader& s) {
    s.read("tol", c.center.tol);
    s.read("max_iterations", c.center.max_iterations, 1, 100000000);
    s.read("atoms", c.center.atoms);
    if (const json* path = s.find("path")) {
      if (!path->is_array()) {
        throw ConfigError(s.at("path") + ": expected an array");
      }
      for (std::size_t i = 0; i < path->size(); ++i) {
        Reader stop((*path)[i], s.at("path") + "[" + std::to_string(i) + "]");
        ProbeStop ps;
        stop.read("p", ps.p);
        stop.read("t", ps.t);
        stop.finish();
        c.center.path.push_back(std::move(ps));
      }
    }
  });
  section(r, "grid", [&](Reader& s) {
    s.read("points", c.grid.points, 1, 10000000);
    s.read("t_steps", c.grid.t_steps, 2, 100000);
    s.read("tol", c.grid.tol);
    s.read("candidates", c.grid.candidates, 1, 100000);
    s.read("max_refine_iterations", c.grid.max_refine_iterations, 0, 1000000);
    s.read("zero_threshold", c.grid.zero_threshold);
  });
  section(r, "degree", [&](Reader& s) {
    s.read("level", c.degree.level, 0, 7);
    s.read("max_level", c.degree.max_level, 0, 7);
  });
  section(r, "optimize", [&](Reader& s) {
    s.read("degree", c.optimize.degree, 1, 12);
    s.read("budget", c.optimize.budget, 1, 100000000);
    s.read("initial_step", c.optimize.initial_step);
    s.read("min_step", c.optimize.min_step);
  });
  r.finish();
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_config(doc);
}

namespace {

json metric_to_json(const MetricSpec& s) {
  json out;
  switch (s.kind) {
    case MetricSpec::Kind::round:
      out["type"] = "round";
      break;
    case MetricSpec::Kind::constant:
      out = {{"type", "constant"}, {"value", s.shift}};
      break;
    case MetricSpec::Kind::harmonic:
      out = {{"type", "harmonic"}, {"coeffs", s.coeffs}};
      break;
    case MetricSpec::Kind::nodal:
      out = {{"type", "nodal"}, {"values", s.values}};
      break;
    case MetricSpec::Kind::two_bubble:
      out = {{"type", "two_bubble"}, {"s", s.s}};
      if (!s.axis.empty()) {
        out["axis"] = s.axis;
      }
      break;
    case MetricSpec::Kind::random:
      out = {{"type", "random"}, {"count", s.count}, {"degree", s.degree}, {"amplitude", s.amplitude}};
      if (s.seed) {
        out["seed"] = *s.seed;
      }
      break;
  }
  if (!s.label.empty()) {
    out["label"] = s.label;
  }
  return out;
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  json metrics = json::array();
  for (const auto& s : c.metrics) {
    metrics.push_back(metric_to_json(s));
  }
  json path = json::array();
  for (const auto& stop : c.center.path) {
    path.push_back({{"p", stop.p}, {"t", stop.t}});
  }
  json center{{"tol", c.center.tol}, {"max_iterations", c.center.max_iterations}, {"path", path}};
  if (!c.center.atoms.empty()) {
    center["atoms"] = c.center.atoms;
  }
  return {
      {"m", c.m},
      {"level", c.level},
      {"seed", c.seed},
      {"workers", c.workers},
      {"slack", c.slack},
      {"out", c.out.string()},
      {"metrics", metrics},
      {"solver",
       {{"count", c.solver.count},
        {"tol", c.solver.tol},
        {"max_iterations", c.solver.max_iterations},
        {"dense_threshold", c.solver.dense_threshold}}},
      {"geometry", {{"samples", c.geometry.samples}, {"tol", c.geometry.tol}, {"radius", c.geometry.radius}}},
      {"center", center},
      {"grid",
       {{"points", c.grid.points},
        {"t_steps", c.grid.t_steps},
        {"tol", c.grid.tol},
        {"candidates", c.grid.candidates},
        {"max_refine_iterations", c.grid.max_refine_iterations},
        {"zero_threshold", c.grid.zero_threshold}}},
      {"degree", {{"level", c.degree.level}, {"max_level", c.degree.max_level}}},
      {"optimize",
       {{"degree", c.optimize.degree},
        {"budget", c.optimize.budget},
        {"initial_step", c.optimize.initial_step},
        {"min_step", c.optimize.min_step}}},
  };
}

namespace {

std::string short_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::string numbered(const std::string& label, int k, int total) {
  return total == 1 ? label : label + "-" + std::to_string(k);
}

}  // namespace

std::vector<NamedMetric> build_metrics(const ExperimentConfig& c, std::shared_ptr<const Mesh> mesh) {
  std::vector<NamedMetric> out;
  const int m = c.m;
  for (std::size_t i = 0; i < c.metrics.size(); ++i) {
    const MetricSpec& s = c.metrics[i];
    const std::string where = "config.metrics[" + std::to_string(i) + "]";
    try {
      switch (s.kind) {
        case MetricSpec::Kind::round:
          out.push_back({s.label.empty() ? "round" : s.label, ConformalMetric::round(m)});
          break;
        case MetricSpec::Kind::constant:
          out.push_back({s.label.empty() ? "constant=" + short_number(s.shift) : s.label,
                         ConformalMetric::constant(m, s.shift)});
          break;
        case MetricSpec::Kind::harmonic:
          if (harmonic_degree_for_count(m, static_cast<int>(s.coeffs.size())) < 0) {
            throw ConfigError(where + ".coeffs: " + std::to_string(s.coeffs.size()) +
                              " is not the size of a complete harmonic basis for m=" + std::to_string(m));
          }
          out.push_back({s.label.empty() ? "harmonic-" + std::to_string(i) : s.label,
                         ConformalMetric::harmonic(m, s.coeffs)});
          break;
        case MetricSpec::Kind::nodal:
          if (static_cast<Eigen::Index>(s.values.size()) != mesh->vertex_count()) {
            throw ConfigError(where + ".values: " + std::to_string(s.values.size()) + " values for a mesh with " +
                              std::to_string(mesh->vertex_count()) + " vertices");
          }
          out.push_back({s.label.empty() ? "nodal-" + std::to_string(i) : s.label,
                         ConformalMetric::nodal(mesh, Eigen::Map<const Eigen::VectorXd>(
                                                          s.values.data(), static_cast<Eigen::Index>(s.values.size())))});
          break;
        case MetricSpec::Kind::two_bubble: {
          SpherePoint axis = SpherePoint::basis(m, m);
          if (!s.axis.empty()) {
            if (static_cast<int>(s.axis.size()) != m + 1) {
              throw ConfigError(where + ".axis: needs m+1 coordinates");
            }
            axis = SpherePoint::normalized(
                Eigen::Map<const Eigen::VectorXd>(s.axis.data(), static_cast<Eigen::Index>(s.axis.size())));
          }
          const int total = static_cast<int>(s.s.size());
          for (int k = 0; k < total; ++k) {
            const std::string base = s.label.empty() ? "two-bubble-s=" + short_number(s.s[k]) : numbered(s.label, k, total);
            out.push_back({base, two_bubble(s.s[k], axis, mesh)});
          }
          break;
        }
        case MetricSpec::Kind::random: {
          const std::uint64_t seed = s.seed.value_or(c.seed);
          for (int k = 0; k < s.count; ++k) {
            const std::uint64_t sk = seed + static_cast<std::uint64_t>(k);
            out.push_back({s.label.empty() ? "random-" + std::to_string(sk) : numbered(s.label, k, s.count),
                           ConformalMetric::random(m, s.degree, s.amplitude, sk)});
          }
          break;
        }
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  return out;
}

EigenOptions eigen_options(const ExperimentConfig& c) { return c.solver; }

CenterOptions center_options(const ExperimentConfig& c) {
  CenterOptions o;
  o.tol = c.center.tol;
  o.max_iterations = c.center.max_iterations;
  return o;
}

ZeroSearchOptions zero_options(const ExperimentConfig& c) {
  ZeroSearchOptions o;
  o.grid_points = c.grid.points;
  o.t_steps = c.grid.t_steps;
  o.tol = c.grid.tol;
  o.candidates = c.grid.candidates;
  o.max_refine_iterations = c.grid.max_refine_iterations;
  o.workers = c.workers;
  return o;
}

DegreeOptions degree_options(const ExperimentConfig& c) {
  DegreeOptions o;
  o.level = c.degree.level;
  o.max_level = c.degree.max_level;
  o.seed = c.seed;
  return o;
}

MaximizeOptions maximize_options(const ExperimentConfig& c) {
  MaximizeOptions o;
  o.degree = c.optimize.degree;
  o.budget = c.optimize.budget;
  o.initial_step = c.optimize.initial_step;
  o.min_step = c.optimize.min_step;
  o.seed = c.seed;
  o.workers = c.workers;
  o.eigen = c.solver;
  return o;
}

}  // namespace confbound::cli
