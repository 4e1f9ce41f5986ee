#pragma once

#include "confbound/discretize.hpp"
#include "confbound/eigensolve.hpp"
#include "confbound/measures.hpp"
#include "confbound/mesh.hpp"
#include "confbound/optimize.hpp"
#include "confbound/verify.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace confbound::cli {

/// Schema or value error in a configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One entry of the "metrics" list. A random entry expands to `count`
/// metrics and a two-bubble entry to one metric per s value.
struct MetricSpec {
  enum class Kind { round, constant, harmonic, nodal, two_bubble, random };
  Kind kind = Kind::round;
  std::string label;  // empty: derived from the kind
  double shift = 0.0;                // constant
  std::vector<double> coeffs;        // harmonic
  std::vector<double> values;        // nodal
  std::vector<double> s;             // two_bubble
  std::vector<double> axis;          // two_bubble; empty: last basis vector
  int count = 1;                     // random
  int degree = 4;                    // random
  double amplitude = 0.5;            // random
  std::optional<std::uint64_t> seed; // random; default: the experiment seed
};

struct GeometryConfig {
  int samples = 10000;
  double tol = 1e-12;
  double radius = 0.9;
};

struct ProbeStop {
  std::vector<double> p;
  double t = 0.0;
};

struct CenterConfig {
  double tol = 1e-13;
  int max_iterations = 10000;
  std::string atoms;            // optional atoms file replacing the metric measure
  std::vector<ProbeStop> path;  // empty: default path towards t = 1
};

struct GridConfig {
  int points = 512;
  int t_steps = 33;
  double tol = 1e-6;
  int candidates = 8;
  int max_refine_iterations = 100;
  /// |V(p,0)| / Vol below this on the grid counts as a visible zero at t = 0.
  double zero_threshold = 1e-3;
};

struct DegreeConfig {
  int level = 2;
  int max_level = 5;
};

struct OptimizeConfig {
  int degree = 2;
  int budget = 200;
  double initial_step = 0.25;
  double min_step = 1e-4;
};

struct ExperimentConfig {
  int m = 2;
  int level = 4;
  std::uint64_t seed = 1;
  int workers = 0;
  double slack = -1.0;  // negative: 2% for m = 2, 3% otherwise
  std::vector<MetricSpec> metrics{MetricSpec{}};
  EigenOptions solver;
  GeometryConfig geometry;
  CenterConfig center;
  GridConfig grid;
  DegreeConfig degree;
  OptimizeConfig optimize;
  std::filesystem::path out = "confbound-out";
};

/// Strict parse: unknown keys, wrong types and out-of-range values throw
/// ConfigError with the offending JSON path.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Range checks shared by the parser and the flag overrides.
void validate(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

struct NamedMetric {
  std::string label;
  ConformalMetric metric;
};

/// Expands the metric list on `mesh`. Value errors (coefficient counts,
/// nodal lengths, axes) throw ConfigError.
std::vector<NamedMetric> build_metrics(const ExperimentConfig& config, std::shared_ptr<const Mesh> mesh);

EigenOptions eigen_options(const ExperimentConfig& config);
CenterOptions center_options(const ExperimentConfig& config);
ZeroSearchOptions zero_options(const ExperimentConfig& config);
DegreeOptions degree_options(const ExperimentConfig& config);
MaximizeOptions maximize_options(const ExperimentConfig& config);

}  // namespace confbound::cli
