#include "confbound/optimize.hpp"

#include "confbound/harmonics.hpp"
#include "confbound/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

namespace confbound {

double concentration_radius(double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw OptimizeError("concentration parameter must be finite and non-negative");
  }
  return s / (1.0 + s);
}

ConformalMetric two_bubble(double s, const SpherePoint& axis, std::shared_ptr<const Mesh> mesh) {
  if (!mesh) {
    throw OptimizeError("two-bubble metric needs a mesh");
  }
  if (axis.dim() != mesh->m) {
    throw OptimizeError("axis and mesh dimensions differ");
  }
  const int m = mesh->m;
  const double r = concentration_radius(s);
  const Vec x = r * axis.coords();
  const double xx = r * r;
  Eigen::VectorXd phi(mesh->vertex_count());
  for (Eigen::Index i = 0; i < mesh->vertex_count(); ++i) {
    const double xz = x.dot(mesh->vertices.col(i));
    // m log rho_{+x} and m log rho_{-x}, combined by log-sum-exp.
    const double a = m * std::log((1.0 - xx) / (1.0 - 2.0 * xz + xx));
    const double b = m * std::log((1.0 - xx) / (1.0 + 2.0 * xz + xx));
    const double hi = std::max(a, b);
    phi[i] = (hi + std::log(std::exp(a - hi) + std::exp(b - hi))) / m;
  }
  return ConformalMetric::nodal(std::move(mesh), std::move(phi));
}

Objective evaluate_objective(const Mesh& mesh, const Eigen::VectorXd& phi, const EigenOptions& eigen) {
  const SpectrumResult spectrum = solve_bottom(assemble_nodal(mesh, phi), eigen);
  return Objective{normalized_eigenvalue(spectrum, 1, mesh.m), normalized_eigenvalue(spectrum, 2, mesh.m),
                   spectrum.volume};
}

OptimizationRun maximize(const ConformalMetric& start, std::shared_ptr<const Mesh> mesh,
                         const MaximizeOptions& options) {
  if (!mesh) {
    throw OptimizeError("optimization needs a mesh");
  }
  if (options.budget < 1) {
    throw OptimizeError("optimization budget must be at least one evaluation");
  }
  if (options.degree < 1) {
    throw OptimizeError("perturbation degree must be at least 1");
  }
  if (!(options.initial_step > 0.0) || !(options.min_step > 0.0)) {
    throw OptimizeError("pattern search steps must be positive");
  }
  const int m = mesh->m;
  const Eigen::VectorXd base = start.sample(*mesh);
  const int n = harmonic_count(m, options.degree) - 1;
  Eigen::MatrixXd basis(mesh->vertex_count(), n);
  for (Eigen::Index i = 0; i < mesh->vertex_count(); ++i) {
    basis.row(i) = harmonic_basis(m, options.degree, mesh->vertices.col(i)).tail(n).transpose();
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto evaluate = [&](const Eigen::VectorXd& a) {
    Iterate it;
    it.coeffs.assign(a.data(), a.data() + a.size());
    try {
      const Objective obj = evaluate_objective(*mesh, base + basis * a, options.eigen);
      it.objective = obj.lambda2;
      it.lambda1 = obj.lambda1;
    } catch (const std::exception& e) {
      it.objective = -std::numeric_limits<double>::infinity();
      it.lambda1 = std::numeric_limits<double>::quiet_NaN();
      it.note = e.what();
    }
    it.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return it;
  };

  OptimizationRun run;
  run.degree = options.degree;
  Eigen::VectorXd current = Eigen::VectorXd::Zero(n);
  auto record = [&](Iterate it) {
    it.index = static_cast<int>(run.history.size());
    if (run.history.empty() || it.objective > run.best) {
      run.best = it.objective;
      run.best_coeffs = it.coeffs;
    }
    it.best_so_far = run.best;
    run.history.push_back(std::move(it));
  };
  record(evaluate(current));

  std::mt19937_64 rng(options.seed);
  std::vector<int> directions(static_cast<std::size_t>(2 * n));
  double step = options.initial_step;
  run.termination = "budget exhausted";
  while (static_cast<int>(run.history.size()) < options.budget) {
    if (step < options.min_step) {
      run.termination = "step below minimum";
      break;
    }
    std::iota(directions.begin(), directions.end(), 0);
    std::shuffle(directions.begin(), directions.end(), rng);
    const auto remaining = static_cast<std::size_t>(options.budget) - run.history.size();
    const std::size_t batch = std::min(directions.size(), remaining);
    std::vector<Iterate> polled(batch);
    parallel_for(batch, options.workers, [&](std::size_t k) {
      const int dir = directions[k];
      Eigen::VectorXd trial = current;
      trial[dir / 2] += (dir % 2 == 0 ? step : -step);
      polled[k] = evaluate(trial);
    });
    const double before = run.best;
    std::size_t winner = batch;
    for (std::size_t k = 0; k < batch; ++k) {
      if (polled[k].objective > before && (winner == batch || polled[k].objective > polled[winner].objective)) {
        winner = k;
      }
    }
    if (winner != batch) {
      current = Eigen::Map<const Eigen::VectorXd>(polled[winner].coeffs.data(), n);
    } else {
      step *= 0.5;
    }
    for (auto& it : polled) {
      record(std::move(it));
    }
  }
  return run;
}

void write_run_jsonl(std::ostream& out, const OptimizationRun& run) {
  for (const auto& it : run.history) {
    nlohmann::json line{
        {"index", it.index},
        {"coeffs", it.coeffs},
        {"objective", it.objective},
        {"lambda1_normalized", it.lambda1},
        {"lambda2_normalized", it.objective},
        {"best_so_far", it.best_so_far},
        {"wall_seconds", it.seconds},
    };
    if (!it.note.empty()) {
      line["note"] = it.note;
    }
    out << line.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

}  // namespace confbound
