#include "confbound/verify.hpp"

#include "confbound/constants.hpp"
#include "confbound/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace confbound {

CenterOptions precise_center_options() {
  CenterOptions options;
  options.tol = 1e-13;
  return options;
}

Discretization discretize_nodal(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd phi) {
  if (!mesh) {
    throw VerifyError("discretization needs a mesh");
  }
  DiscreteMeasure measure = volume_measure_nodal(*mesh, phi);
  GalerkinPair pair = assemble_nodal(*mesh, phi);
  return Discretization{std::move(mesh), std::move(phi), std::move(measure), std::move(pair)};
}

Discretization discretize(const ConformalMetric& g, std::shared_ptr<const Mesh> mesh) {
  if (!mesh) {
    throw VerifyError("discretization needs a mesh");
  }
  Eigen::VectorXd phi = g.sample(*mesh);
  return discretize_nodal(std::move(mesh), std::move(phi));
}

namespace {

// T_{-c}(F_H(y_i)) for every atom, plus c_H.
struct Recentered {
  BallPoint center;
  Eigen::MatrixXd values;
};

Recentered recenter(const DiscreteMeasure& mu, const CapChoice& cap, const CenterOptions& options) {
  const DiscreteMeasure folded = pushforward_fold(mu, cap);
  const CenterOfMass com = center_of_mass(folded, options);
  const Vec neg_c = -com.c.coords();
  Eigen::MatrixXd values(folded.points().rows(), folded.size());
  for (Eigen::Index i = 0; i < folded.size(); ++i) {
    const Vec z = kernel::mobius(neg_c, folded.points().col(i));
    values.col(i) = z / z.norm();
  }
  return Recentered{com.c, std::move(values)};
}

}  // namespace

TrialFamily trial_family(const Discretization& d, const CapChoice& cap, const CenterOptions& options) {
  if (cap && cap->dim() != d.dim()) {
    throw VerifyError("cap and metric dimensions differ");
  }
  Recentered r = recenter(d.measure, cap, options);
  Eigen::VectorXd means = r.values * d.measure.weights();
  return TrialFamily{cap, r.center, std::move(r.values), std::move(means)};
}

Eigen::VectorXd first_excited(const SpectrumResult& spectrum) {
  if (spectrum.eigenvectors.cols() < 2) {
    throw VerifyError("spectrum has no first excited state");
  }
  Eigen::VectorXd f = spectrum.eigenvectors.col(1);
  const double scale = f.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) > 1e-12 * scale) {
      if (f[i] < 0.0) {
        f = -f;
      }
      break;
    }
  }
  return f;
}

VectorField::VectorField(std::shared_ptr<const Discretization> d, Eigen::VectorXd f, CenterOptions options)
    : d_(std::move(d)), f_(std::move(f)), options_(std::move(options)) {
  if (!d_) {
    throw VerifyError("vector field needs a discretization");
  }
  if (f_.size() != d_->measure.size()) {
    throw VerifyError("first excited state does not match the mesh");
  }
  whole_ = (*this)(std::nullopt);
}

VectorField::Value VectorField::evaluate(const CapChoice& cap, const std::optional<Vec>& start) const {
  if (cap && cap->dim() != dim()) {
    throw VerifyError("cap and field dimensions differ");
  }
  CenterOptions options = options_;
  if (start) {
    options.start = start;
  }
  const Recentered r = recenter(d_->measure, cap, options);
  const Eigen::VectorXd weighted = d_->measure.weights().cwiseProduct(f_);
  return Value{Vec(r.values * weighted), r.center.coords()};
}

VectorFieldSample VectorField::sample(const SpherePoint& p, double t) const {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw VerifyError("vector field parameter t must lie in [0, 1]");
  }
  VectorFieldSample s;
  s.p = p.coords();
  s.t = t;
  s.value = t == 1.0 ? whole_ : (*this)(Cap::make(p, t));
  return s;
}

std::vector<SpherePoint> sphere_lattice(int m, int n) {
  if (n < 1) {
    throw VerifyError("lattice needs at least one point");
  }
  std::vector<SpherePoint> out;
  out.reserve(static_cast<std::size_t>(n));
  const double pi = std::numbers::pi;
  if (m == 2) {
    const double golden = pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = golden * i;
      out.push_back(SpherePoint::normalized(Eigen::Vector3d(r * std::cos(a), r * std::sin(a), z)));
    }
    return out;
  }
  if (m == 3) {
    const double phi = std::sqrt(2.0);
    const double psi = 1.533751168755204288118041;
    for (int i = 0; i < n; ++i) {
      const double s = i + 0.5;
      const double r = std::sqrt(s / n);
      const double big_r = std::sqrt(1.0 - s / n);
      const double alpha = 2.0 * pi * s / phi;
      const double beta = 2.0 * pi * s / psi;
      out.push_back(SpherePoint::normalized(Eigen::Vector4d(r * std::sin(alpha), r * std::cos(alpha),
                                                            big_r * std::sin(beta), big_r * std::cos(beta))));
    }
    return out;
  }
  throw VerifyError("sphere lattices are available for m = 2 and m = 3 only");
}

namespace {

constexpr double kMaxRefineT = 1.0 - 1e-7;

// Orthonormal basis of the tangent space at p, as columns.
Eigen::MatrixXd tangent_basis(const Vec& p) {
  const Eigen::VectorXd v = p;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(v)};
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(v.size(), v.size());
  return q.rightCols(v.size() - 1);
}

struct Point {
  Vec p;
  double t;
  Vec value;
  double norm;
  Vec center;
};

class Refiner {
 public:
  Refiner(const VectorField& field, double target, int& evaluations)
      : field_(field), target_(target), evaluations_(evaluations) {}

  Point eval(const Vec& p, double t, const std::optional<Vec>& start = std::nullopt) const {
    ++evaluations_;
    Point out{p / p.norm(), std::clamp(t, 0.0, kMaxRefineT), Vec(), 0.0, Vec()};
    VectorField::Value v = field_.evaluate(Cap::make(SpherePoint::from_unit(out.p, 1e-9), out.t), start);
    out.value = std::move(v.value);
    out.center = std::move(v.center);
    out.norm = out.value.norm();
    return out;
  }

  Point run(Point x, int max_iterations) const {
    x = levenberg_marquardt(std::move(x), max_iterations);
    if (x.norm > target_) {
      x = compass(std::move(x), max_iterations);
      if (x.norm > target_) {
        x = levenberg_marquardt(std::move(x), max_iterations);
      }
    }
    return x;
  }

 private:
  Point move(const Point& x, const Eigen::MatrixXd& basis, const Eigen::VectorXd& step) const {
    const int m = static_cast<int>(basis.cols());
    const Vec p = x.p + basis * step.head(m);
    return eval(p, x.t + step[m], x.center);
  }

  Point levenberg_marquardt(Point x, int max_iterations) const {
    double mu = 1e-3;
    for (int iter = 0; iter < max_iterations && x.norm > target_; ++iter) {
      const Eigen::MatrixXd basis = tangent_basis(x.p);
      const int m = static_cast<int>(basis.cols());
      Eigen::MatrixXd jac(m + 1, m + 1);
      const double h = 1e-6;
      for (int k = 0; k <= m; ++k) {
        Eigen::VectorXd step = Eigen::VectorXd::Zero(m + 1);
        double hk = h;
        if (k == m && x.t + h > kMaxRefineT) {
          hk = -h;
        }
        step[k] = hk;
        const Point y = move(x, basis, step);
        // The actual t step may be clipped at 0.
        const double taken = k == m ? y.t - x.t : hk;
        if (taken == 0.0) {
          jac.col(k).setZero();
          continue;
        }
        jac.col(k) = (y.value - x.value) / taken;
      }
      const Eigen::MatrixXd jtj = jac.transpose() * jac;
      const Eigen::VectorXd jtr = jac.transpose() * Eigen::VectorXd(x.value);
      bool accepted = false;
      while (mu < 1e10) {
        Eigen::MatrixXd lhs = jtj;
        lhs.diagonal() += mu * jtj.diagonal().cwiseMax(1e-12 * jtj.diagonal().maxCoeff());
        Eigen::VectorXd step = -lhs.ldlt().solve(jtr);
        // Keep steps local: the field is only piecewise smooth.
        const double len = step.norm();
        if (len > 0.25) {
          step *= 0.25 / len;
        }
        if (!step.allFinite()) {
          mu *= 10.0;
          continue;
        }
        Point y = move(x, basis, step);
        if (y.norm < x.norm) {
          x = std::move(y);
          mu = std::max(mu / 3.0, 1e-12);
          accepted = true;
          break;
        }
        mu *= 4.0;
      }
      if (!accepted) {
        break;
      }
    }
    return x;
  }

  Point compass(Point x, int max_iterations) const {
    double step = 1e-3;
    for (int iter = 0; iter < max_iterations && x.norm > target_ && step > 1e-12; ++iter) {
      const Eigen::MatrixXd basis = tangent_basis(x.p);
      const int m = static_cast<int>(basis.cols());
      bool improved = false;
      for (int k = 0; k <= m && !improved; ++k) {
        for (double sign : {1.0, -1.0}) {
          Eigen::VectorXd dir = Eigen::VectorXd::Zero(m + 1);
          dir[k] = sign * step;
          Point y = move(x, basis, dir);
          if (y.norm < x.norm) {
            x = std::move(y);
            improved = true;
            break;
          }
        }
      }
      step = improved ? step * 2.0 : step * 0.5;
    }
    return x;
  }

  const VectorField& field_;
  double target_;
  int& evaluations_;
};

}  // namespace

ZeroSearchResult find_zero(const VectorField& field, const ZeroSearchOptions& options) {
  if (options.grid_points < 1 || options.t_steps < 2) {
    throw VerifyError("zero search needs at least one lattice point and two t values");
  }
  if (!(options.tol > 0.0)) {
    throw VerifyError("zero search tolerance must be positive");
  }
  const int m = field.dim();
  const double target = options.tol * field.volume();
  const std::vector<SpherePoint> lattice = sphere_lattice(m, options.grid_points);
  const auto per_point = static_cast<std::size_t>(options.t_steps);

  ZeroSearchResult result;
  result.grid.resize(lattice.size() * per_point);
  parallel_for(lattice.size(), options.workers, [&](std::size_t i) {
    // Centers move continuously in t; each solve starts from the previous one.
    std::optional<Vec> start;
    for (std::size_t k = 0; k + 1 < per_point; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(per_point - 1);
      VectorField::Value v = field.evaluate(Cap::make(lattice[i], t), start);
      start = std::move(v.center);
      result.grid[i * per_point + k] = VectorFieldSample{lattice[i].coords(), t, std::move(v.value)};
    }
    result.grid[i * per_point + per_point - 1] = VectorFieldSample{lattice[i].coords(), 1.0, field.whole_sphere()};
  });
  result.evaluations = static_cast<int>(lattice.size() * (per_point - 1));

  std::vector<std::size_t> order(result.grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return result.grid[a].norm() < result.grid[b].norm(); });

  const VectorFieldSample& grid_best = result.grid[order.front()];
  result.best = grid_best;
  if (grid_best.t == 1.0 && grid_best.norm() <= target) {
    result.whole_sphere = true;
    result.converged = true;
    result.relative_norm = grid_best.norm() / field.volume();
    return result;
  }

  // Distinct interior candidates, best first.
  for (std::size_t idx : order) {
    if (static_cast<int>(result.candidates.size()) >= options.candidates) {
      break;
    }
    const VectorFieldSample& s = result.grid[idx];
    if (s.t >= 1.0) {
      continue;
    }
    const bool distinct = std::none_of(result.candidates.begin(), result.candidates.end(), [&](std::size_t c) {
      const VectorFieldSample& o = result.grid[c];
      return (o.p - s.p).norm() + std::abs(o.t - s.t) < 0.2;
    });
    if (distinct) {
      result.candidates.push_back(idx);
    }
  }

  const Refiner refiner(field, target, result.evaluations);
  Point best{grid_best.p, grid_best.t, grid_best.value, grid_best.norm(), Vec()};
  for (std::size_t idx : result.candidates) {
    const VectorFieldSample& s = result.grid[idx];
    const Point start = refiner.eval(s.p, s.t);
    Point found = refiner.run(start, options.max_refine_iterations);
    if (found.norm < best.norm || (best.t == 1.0 && found.norm <= target)) {
      best = found;
    }
    if (found.norm <= target) {
      best = found;
      break;
    }
  }
  result.best = VectorFieldSample{best.p, best.t, best.value};
  result.relative_norm = best.norm / field.volume();
  result.converged = best.norm <= target;
  result.whole_sphere = best.t == 1.0 && result.converged;
  return result;
}

void write_field_csv(std::ostream& out, const std::vector<VectorFieldSample>& grid) {
  if (grid.empty()) {
    return;
  }
  const auto d = grid.front().p.size();
  const auto old_precision = out.precision(17);
  for (Eigen::Index j = 0; j < d; ++j) {
    out << 'p' << j + 1 << ',';
  }
  out << 't';
  for (Eigen::Index j = 0; j < d; ++j) {
    out << ",V" << j + 1;
  }
  out << ",norm\n";
  for (const auto& s : grid) {
    for (Eigen::Index j = 0; j < d; ++j) {
      out << s.p[j] << ',';
    }
    out << s.t;
    for (Eigen::Index j = 0; j < d; ++j) {
      out << ',' << s.value[j];
    }
    out << ',' << s.norm() << '\n';
  }
  out.precision(old_precision);
}

double default_slack(int m) { return m == 2 ? 0.02 : 0.03; }

bool ChainReport::all_hold() const {
  return !links.empty() && std::all_of(links.begin(), links.end(), [](const ChainLink& l) { return l.holds; });
}

ChainReport bound_chain(std::shared_ptr<const Discretization> d, const SpectrumResult& spectrum,
                        const ChainOptions& options) {
  if (!d) {
    throw VerifyError("bound chain needs a discretization");
  }
  if (spectrum.eigenvalues.size() < 3) {
    throw VerifyError("bound chain needs lambda_0 .. lambda_2");
  }
  const int m = d->dim();
  const Mesh& mesh = *d->mesh;
  const double vol = d->volume();
  const double exponent = 2.0 / m;

  ChainReport r;
  r.m = m;
  r.level = mesh.level;
  r.volume = vol;
  r.lambda1 = spectrum.eigenvalues[1];
  r.lambda2 = spectrum.eigenvalues[2];
  r.normalized_lambda1 = r.lambda1 * std::pow(vol, exponent);
  r.normalized_lambda2 = r.lambda2 * std::pow(vol, exponent);
  r.slack = options.slack >= 0.0 ? options.slack : default_slack(m);
  r.bound = second_eigenvalue_bound(m);

  const Eigen::VectorXd f = first_excited(spectrum);
  CapChoice cap;
  if (options.force_whole_sphere) {
    r.whole_sphere = true;
    r.zero_converged = false;
  } else {
    const VectorField field(d, f, options.center);
    const ZeroSearchResult zero = find_zero(field, options.zero);
    r.zero_converged = zero.converged;
    r.whole_sphere = zero.best.t == 1.0;
    if (!r.whole_sphere) {
      cap = Cap::make(SpherePoint::from_unit(zero.best.p, 1e-9), zero.best.t);
      r.p = zero.best.p;
      r.t = zero.best.t;
    }
  }

  const TrialFamily family = trial_family(*d, cap, options.center);
  r.center = family.center.coords();
  r.orthogonality = family.means.cwiseAbs().maxCoeff() / vol;
  const Eigen::VectorXd mass_f = d->pair.mass * f;
  r.field_residual = (family.values * mass_f).norm() / vol;

  for (Eigen::Index j = 0; j <= m; ++j) {
    const Eigen::VectorXd u = family.values.row(j).transpose();
    const double num = u.dot(d->pair.stiffness * u);
    const double den = u.dot(d->pair.mass * u);
    r.numerators.push_back(num);
    r.denominators.push_back(den);
    r.rayleigh.push_back(num / den);
  }
  double num_sum = 0.0;
  for (double n : r.numerators) {
    num_sum += n;
  }
  r.averaged_rayleigh = num_sum * std::pow(vol, exponent - 1.0);
  r.post_holder = std::pow(dirichlet_m_energy(mesh, family.values), exponent);

  // T_{-c} without the fold, and the identity.
  const Vec neg_c = -family.center.coords();
  const Vec c = family.center.coords();
  Eigen::MatrixXd recentered(m + 1, mesh.vertex_count());
  for (Eigen::Index i = 0; i < mesh.vertex_count(); ++i) {
    const Vec z = kernel::mobius(neg_c, mesh.vertices.col(i));
    recentered.col(i) = z / z.norm();
  }
  const CellRegion in_cap = cap_region(cap);
  const kernel::FoldMap fold_map(cap);
  const CellRegion in_image = [&](const Vec& z) { return fold_map.contains(kernel::mobius(c, z)); };
  const double cap_factor = r.whole_sphere ? 1.0 : std::pow(2.0, exponent);
  r.folded_cap = cap_factor * std::pow(dirichlet_m_energy(mesh, recentered, in_cap), exponent);
  r.change_of_variables = cap_factor * std::pow(dirichlet_m_energy(mesh, mesh.vertices, in_image), exponent);
  r.estimate = r.whole_sphere ? first_eigenvalue_bound(m) : r.bound;

  auto link = [&](std::string name, double lhs, double rhs) {
    r.links.push_back(ChainLink{std::move(name), lhs, rhs, lhs <= rhs * (1.0 + r.slack)});
  };
  for (int j = 0; j <= m; ++j) {
    link("rayleigh_" + std::to_string(j), r.lambda2, r.rayleigh[static_cast<std::size_t>(j)]);
  }
  link("averaging", r.normalized_lambda2, r.averaged_rayleigh);
  link("holder", r.averaged_rayleigh, r.post_holder);
  link("fold", r.post_holder, r.folded_cap);
  link("change_of_variables", r.folded_cap, r.change_of_variables);
  link("estimate", r.change_of_variables, r.estimate);
  link("bound", r.normalized_lambda2, r.bound);
  return r;
}

nlohmann::json to_json(const ChainReport& r) {
  auto vec = [](const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json links = nlohmann::json::array();
  for (const auto& l : r.links) {
    links.push_back({{"name", l.name}, {"lhs", l.lhs}, {"rhs", l.rhs}, {"holds", l.holds}});
  }
  nlohmann::json doc{
      {"m", r.m},
      {"level", r.level},
      {"volume", r.volume},
      {"lambda1", r.lambda1},
      {"lambda2", r.lambda2},
      {"normalized_lambda1", r.normalized_lambda1},
      {"normalized_lambda2", r.normalized_lambda2},
      {"whole_sphere", r.whole_sphere},
      {"zero_converged", r.zero_converged},
      {"t", r.t},
      {"center", vec(r.center)},
      {"field_residual", r.field_residual},
      {"orthogonality", r.orthogonality},
      {"numerators", r.numerators},
      {"denominators", r.denominators},
      {"rayleigh", r.rayleigh},
      {"averaged_rayleigh", r.averaged_rayleigh},
      {"post_holder", r.post_holder},
      {"folded_cap", r.folded_cap},
      {"change_of_variables", r.change_of_variables},
      {"estimate", r.estimate},
      {"bound", r.bound},
      {"slack", r.slack},
      {"links", links},
      {"all_hold", r.all_hold()},
  };
  doc["p"] = r.whole_sphere ? nlohmann::json(nullptr) : nlohmann::json(vec(r.p));
  return doc;
}

}  // namespace confbound
