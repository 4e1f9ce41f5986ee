#pragma once

#include "confbound/discretize.hpp"
#include "confbound/eigensolve.hpp"
#include "confbound/mesh.hpp"
#include "confbound/sphere_geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace confbound {

class OptimizeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// s / (1 + s): concentration parameter to Möbius parameter in [0, 1).
double concentration_radius(double s);

/// Nodal metric with e^{m phi} = rho_x^m + rho_{-x}^m, x = s' axis, where
/// rho_x^m is the density of (T_x)_* of the round measure. The continuum
/// volume is exactly 2 sigma_m; s = 0 is the round metric scaled to that volume.
ConformalMetric two_bubble(double s, const SpherePoint& axis, std::shared_ptr<const Mesh> mesh);

/// Normalized eigenvalues of one metric.
struct Objective {
  double lambda1 = 0.0;  // lambda_1 Vol^{2/m}
  double lambda2 = 0.0;  // lambda_2 Vol^{2/m}
  double volume = 0.0;
};

Objective evaluate_objective(const Mesh& mesh, const Eigen::VectorXd& phi, const EigenOptions& eigen = {});

struct MaximizeOptions {
  int degree = 2;   // harmonic degree L of the perturbation
  int budget = 200; // objective evaluations
  double initial_step = 0.25;
  double min_step = 1e-4;
  std::uint64_t seed = 1;
  int workers = 0;
  EigenOptions eigen;
};

struct Iterate {
  int index = 0;
  std::vector<double> coeffs;  // perturbation coefficients, degree 0 excluded
  double objective = 0.0;      // lambda_2 Vol^{2/m}; -inf when the solve failed
  double lambda1 = 0.0;        // lambda_1 Vol^{2/m}
  double best_so_far = 0.0;
  double seconds = 0.0;        // wall time since the run started
  std::string note;            // failure diagnostic, if any
};

struct OptimizationRun {
  int degree = 0;
  std::vector<Iterate> history;
  std::vector<double> best_coeffs;
  double best = 0.0;
  std::string termination;
};

/// Compass search ascent on phi = phi_start + sum_{1 <= l <= L} a_{l,k} Y_{l,k}
/// sampled at the mesh vertices. Each poll evaluates all 2n signed coordinate
/// steps (in parallel), moves to the best improving one and otherwise halves
/// the step. The first evaluation is the start itself. Polling directions are
/// visited in a seeded random order, which only matters for tie breaking.
OptimizationRun maximize(const ConformalMetric& start, std::shared_ptr<const Mesh> mesh,
                         const MaximizeOptions& options = {});

/// One JSON object per evaluated iterate.
void write_run_jsonl(std::ostream& out, const OptimizationRun& run);

}  // namespace confbound
