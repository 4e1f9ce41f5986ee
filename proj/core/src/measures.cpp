#include "confbound/measures.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace confbound {

DiscreteMeasure::DiscreteMeasure(int m, Eigen::MatrixXd points, Eigen::VectorXd weights)
    : m_(m), points_(std::move(points)), weights_(std::move(weights)) {
  check_dimension(m_);
  if (points_.rows() != m_ + 1) {
    throw MeasureError("atom points must have m+1 rows");
  }
  if (points_.cols() != weights_.size()) {
    throw MeasureError("atom count does not match weight count");
  }
  if (weights_.size() == 0) {
    throw MeasureError("measure has no atoms");
  }
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      throw MeasureError("atom " + std::to_string(i) + " has non-positive weight");
    }
    if (std::abs(points_.col(i).norm() - 1.0) > 1e-9) {
      throw MeasureError("atom " + std::to_string(i) + " is not on the unit sphere");
    }
  }
  total_ = weights_.sum();
}

double DiscreteMeasure::max_point_fraction() const {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (int r = 0; r <= m_; ++r) {
      if (points_(r, a) != points_(r, b)) {
        return points_(r, a) < points_(r, b);
      }
    }
    return false;
  });
  double best = 0.0;
  double run = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k > 0 && (points_.col(order[k]) - points_.col(order[k - 1])).norm() > 1e-12) {
      run = 0.0;
    }
    run += weights_[order[k]];
    best = std::max(best, run);
  }
  return best / total_;
}

DiscreteMeasure pushforward(const DiscreteMeasure& mu, const SphereMap& map) {
  Eigen::MatrixXd moved(mu.points().rows(), mu.points().cols());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    moved.col(i) = map(SpherePoint::from_unit(mu.points().col(i), 1e-9)).coords();
  }
  return DiscreteMeasure(mu.dim(), std::move(moved), mu.weights());
}

DiscreteMeasure pushforward_fold(const DiscreteMeasure& mu, const CapChoice& cap) {
  if (!cap) {
    return mu;
  }
  if (cap->dim() != mu.dim()) {
    throw MeasureError("cap and measure dimensions differ");
  }
  const kernel::FoldMap fold_map(cap);
  Eigen::MatrixXd moved(mu.points().rows(), mu.points().cols());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const Vec y = mu.points().col(i);
    const Vec z = fold_map(y);
    moved.col(i) = z / z.norm();
  }
  return DiscreteMeasure(mu.dim(), std::move(moved), mu.weights());
}

DiscreteMeasure pushforward_mobius(const DiscreteMeasure& mu, const BallPoint& x) {
  if (x.dim() != mu.dim()) {
    throw MeasureError("Möbius parameter and measure dimensions differ");
  }
  if (x.norm() > kMaxBallRadius) {
    throw GeometryError("Möbius parameter too close to the unit sphere");
  }
  Eigen::MatrixXd moved(mu.points().rows(), mu.points().cols());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const Vec z = kernel::mobius(x.coords(), mu.points().col(i));
    moved.col(i) = z / z.norm();
  }
  return DiscreteMeasure(mu.dim(), std::move(moved), mu.weights());
}

namespace {

struct Moments {
  Vec sum;  // sum_i w_i T_{-c}(y_i)
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient, kMaxAmbient> second;
};

Moments pushed_moments(const DiscreteMeasure& mu, const Vec& c) {
  const int d = mu.dim() + 1;
  Moments out{Vec::Zero(d), decltype(Moments::second)::Zero(d, d)};
  const Vec neg_c = -c;
  const double cc = c.squaredNorm();
  const auto& pts = mu.points();
  const auto& w = mu.weights();
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const auto y = pts.col(i);
    // T_{-c}(y) for |y| = 1.
    const double xy = neg_c.dot(y);
    const double inv = 1.0 / (1.0 + 2.0 * xy + cc);
    const Vec z = ((2.0 + 2.0 * xy) * neg_c + (1.0 - cc) * y) * inv;
    out.sum.noalias() += w[i] * z;
    out.second.noalias() += w[i] * z * z.transpose();
  }
  return out;
}

bool admissible(const Vec& c) { return c.allFinite() && c.norm() <= kMaxBallRadius; }

// Weighted majority vote: only the surviving candidate can carry more than
// half of the mass. When the final count is (numerically) zero an exact tie is
// possible and the sort-based count decides.
double heaviest_if_majority(const DiscreteMeasure& mu) {
  const auto& pts = mu.points();
  const auto& w = mu.weights();
  Eigen::Index candidate = 0;
  double count = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (count <= 0.0) {
      candidate = i;
      count = w[i];
    } else if ((pts.col(i) - pts.col(candidate)).norm() <= 1e-12) {
      count += w[i];
    } else if (w[i] > count) {
      candidate = i;
      count = w[i] - count;
    } else {
      count -= w[i];
    }
  }
  if (count <= 1e-12 * mu.total_mass()) {
    return mu.max_point_fraction();
  }
  double mass = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if ((pts.col(i) - pts.col(candidate)).norm() <= 1e-12) {
      mass += w[i];
    }
  }
  return mass / mu.total_mass();
}

}  // namespace

Vec center_residual(const DiscreteMeasure& mu, const BallPoint& c) {
  if (c.dim() != mu.dim()) {
    throw MeasureError("center and measure dimensions differ");
  }
  Vec sum = Vec::Zero(mu.dim() + 1);
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    sum += mu.weights()[i] * kernel::mobius(-c.coords(), mu.points().col(i));
  }
  return sum;
}

CenterOfMass center_of_mass(const DiscreteMeasure& mu, const CenterOptions& options) {
  if (!(options.tol > 0.0)) {
    throw CenterOfMassError("center-of-mass tolerance must be positive");
  }
  const double heaviest = heaviest_if_majority(mu);
  if (heaviest >= 0.5) {
    std::ostringstream msg;
    msg << "center of mass is not unique: a single point carries " << heaviest
        << " of the total mass (must be < 1/2)";
    throw CenterOfMassError(msg.str());
  }

  const int d = mu.dim() + 1;
  const double mass = mu.total_mass();
  const double target = options.tol * mass;
  Vec c = Vec::Zero(d);
  if (options.start) {
    if (options.start->size() != d || !admissible(*options.start)) {
      throw CenterOfMassError("invalid starting point for center-of-mass solve");
    }
    c = *options.start;
  }

  Moments mom = pushed_moments(mu, c);
  double residual = mom.sum.norm();
  int iter = 0;
  const double moment_gain = (d) / (2.0 * (d - 1));

  auto try_direction = [&](const Vec& direction) {
    for (double s = 1.0; s > 1e-6; s *= 0.5) {
      const Vec trial = kernel::mobius(c, Vec(s * direction));
      if (!admissible(trial)) {
        continue;
      }
      Moments next = pushed_moments(mu, trial);
      const double r = next.sum.norm();
      if (r < residual) {
        c = trial;
        mom = std::move(next);
        residual = r;
        return true;
      }
    }
    return false;
  };

  auto limit_step = [](Vec v) {
    const double n = v.norm();
    return n > 0.5 ? Vec(v * (0.5 / n)) : v;
  };

  while (residual > target && iter < options.max_iterations) {
    ++iter;
    const Vec u = mom.sum / mass;
    const auto second = mom.second / mass;
    const auto identity = decltype(mom.second)::Identity(d, d);
    const Vec newton = limit_step(Vec(0.5 * (identity - second).ldlt().solve(u)));
    if (newton.allFinite() && try_direction(newton)) {
      continue;
    }
    if (try_direction(limit_step(Vec(moment_gain * u)))) {
      continue;
    }
    break;
  }

  if (residual > target) {
    std::ostringstream msg;
    msg << "center-of-mass solve did not reach tolerance: residual " << residual << " > " << target << " after "
        << iter << " iterations";
    throw CenterOfMassError(msg.str());
  }
  return CenterOfMass{BallPoint::make(c), residual, iter};
}

CapChoice cap_choice(const SpherePoint& p, double t) {
  if (t == 1.0) {
    return std::nullopt;
  }
  return Cap::make(p, t);
}

CenterOfMass folded_center(const DiscreteMeasure& mu, const CapChoice& cap, const CenterOptions& options) {
  return center_of_mass(pushforward_fold(mu, cap), options);
}

std::vector<BallPoint> center_continuity_probe(const DiscreteMeasure& mu,
                                               const std::vector<std::pair<SpherePoint, double>>& path,
                                               const CenterOptions& options) {
  std::vector<BallPoint> out;
  out.reserve(path.size());
  for (const auto& [p, t] : path) {
    out.push_back(folded_center(mu, cap_choice(p, t), options).c);
  }
  return out;
}

void write_atoms(std::ostream& out, const DiscreteMeasure& mu) {
  const auto old_precision = out.precision(17);
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    for (int r = 0; r <= mu.dim(); ++r) {
      out << mu.points()(r, i) << ' ';
    }
    out << mu.weights()[i] << '\n';
  }
  out.precision(old_precision);
}

DiscreteMeasure read_atoms(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    std::istringstream fields(line);
    std::vector<double> row;
    double v = 0.0;
    while (fields >> v) {
      row.push_back(v);
    }
    if (!fields.eof()) {
      throw MeasureError("malformed atom row: " + line);
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw MeasureError("atom rows have inconsistent widths");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty() || width < 4) {
    throw MeasureError("atom list needs at least one row of 'y_1 ... y_{m+1} weight'");
  }
  const int m = static_cast<int>(width) - 2;
  Eigen::MatrixXd points(m + 1, static_cast<Eigen::Index>(rows.size()));
  Eigen::VectorXd weights(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int r = 0; r <= m; ++r) {
      points(r, static_cast<Eigen::Index>(i)) = rows[i][static_cast<std::size_t>(r)];
    }
    weights[static_cast<Eigen::Index>(i)] = rows[i].back();
  }
  return DiscreteMeasure(m, std::move(points), std::move(weights));
}

}  // namespace confbound
