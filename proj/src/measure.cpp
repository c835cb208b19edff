#include "adcg/measure.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <fmt/format.h>

namespace adcg {

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (const auto& a : atoms_) {
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) {
      throw std::invalid_argument(fmt::format("atom weight must be finite and nonnegative, got {}", a.weight));
    }
  }
}

double AtomicMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight;
  return s;
}

Vector AtomicMeasure::weights() const {
  Vector w(static_cast<Eigen::Index>(atoms_.size()));
  for (std::size_t i = 0; i < atoms_.size(); ++i) w[static_cast<Eigen::Index>(i)] = atoms_[i].weight;
  return w;
}

std::vector<ParameterPoint> AtomicMeasure::support() const {
  std::vector<ParameterPoint> s;
  s.reserve(atoms_.size());
  for (const auto& a : atoms_) s.push_back(a.theta);
  return s;
}

AtomicMeasure AtomicMeasure::with_weights(const Vector& w) const {
  if (static_cast<std::size_t>(w.size()) != atoms_.size()) {
    throw DimensionError("weight vector length differs from support size");
  }
  std::vector<Atom> out = atoms_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].weight = w[static_cast<Eigen::Index>(i)];
  return AtomicMeasure(std::move(out));
}

AtomicMeasure make_measure(const std::vector<ParameterPoint>& support, const Vector& weights) {
  if (static_cast<std::size_t>(weights.size()) != support.size()) {
    throw DimensionError("weight vector length differs from support size");
  }
  std::vector<Atom> atoms;
  atoms.reserve(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    atoms.push_back({weights[static_cast<Eigen::Index>(i)], support[i]});
  }
  return AtomicMeasure(std::move(atoms));
}

AtomicMeasure combine(const AtomicMeasure& a, const AtomicMeasure& b) {
  std::vector<Atom> atoms(a.atoms().begin(), a.atoms().end());
  atoms.insert(atoms.end(), b.atoms().begin(), b.atoms().end());
  return AtomicMeasure(std::move(atoms));
}

Vector apply_forward(const ForwardModel& model, const AtomicMeasure& mu) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(model.output_dim()));
  for (const auto& a : mu.atoms()) {
    model.check_point(a.theta);
    out.noalias() += a.weight * model.psi(a.theta);
  }
  return out;
}

Vector residual(const ForwardModel& model, const AtomicMeasure& mu, const Vector& y) {
  if (static_cast<std::size_t>(y.size()) != model.output_dim()) {
    throw DimensionError(fmt::format("observation has length {}, model output is {}", y.size(),
                                     model.output_dim()));
  }
  return apply_forward(model, mu) - y;
}

Matrix measurement_matrix(const ForwardModel& model, const std::vector<ParameterPoint>& support) {
  Matrix A(static_cast<Eigen::Index>(model.output_dim()), static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    model.check_point(support[i]);
    A.col(static_cast<Eigen::Index>(i)) = model.psi(support[i]);
  }
  return A;
}

AtomicMeasure prune_zero_weights(const AtomicMeasure& mu, double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("prune_zero_weights: tol must be nonnegative");
  std::vector<Atom> kept;
  for (const auto& a : mu.atoms()) {
    if (a.weight > tol) kept.push_back(a);
  }
  return AtomicMeasure(std::move(kept));
}

AtomicMeasure merge_duplicates(const ForwardModel& model, const AtomicMeasure& mu, double tol) {
  std::vector<Atom> out;
  for (const auto& a : mu.atoms()) {
    bool merged = false;
    for (auto& b : out) {
      if (model.normalized_distance(a.theta, b.theta) < tol) {
        b.weight += a.weight;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(a);
  }
  return AtomicMeasure(std::move(out));
}

AtomicMeasure caratheodory_prune(const ForwardModel& model, const AtomicMeasure& mu) {
  const auto d = static_cast<Eigen::Index>(model.output_dim());
  AtomicMeasure current = prune_zero_weights(mu, 0.0);
  if (static_cast<Eigen::Index>(current.size()) <= d + 1) return current;

  std::vector<Atom> atoms(current.atoms().begin(), current.atoms().end());
  Matrix stacked(d + 1, static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    stacked.col(c).head(d) = model.psi(atoms[i].theta);
    stacked(d, c) = 1.0;
  }
  const Vector image_before = stacked.topRows(d) * current.weights();
  const double mass_before = current.total_mass();

  while (static_cast<Eigen::Index>(atoms.size()) > d + 1) {
    Eigen::FullPivLU<Matrix> lu(stacked);
    const Matrix kernel = lu.kernel();
    if (kernel.cols() == 0 || kernel.col(0).lpNorm<Eigen::Infinity>() == 0.0) {
      throw NumericalError("caratheodory_prune: no null-space direction found");
    }
    Vector gamma = kernel.col(0) / kernel.col(0).lpNorm<Eigen::Infinity>();
    if (gamma.minCoeff() >= 0.0) gamma = -gamma;

    const double eps = 1e-12;
    Eigen::Index hit = -1;
    double step = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < gamma.size(); ++i) {
      if (gamma[i] < -eps) {
        const double ratio = atoms[static_cast<std::size_t>(i)].weight / -gamma[i];
        if (ratio < step) {
          step = ratio;
          hit = i;
        }
      }
    }
    if (hit < 0) throw NumericalError("caratheodory_prune: null-space direction has no descent entry");

    for (Eigen::Index i = 0; i < gamma.size(); ++i) {
      auto& w = atoms[static_cast<std::size_t>(i)].weight;
      w = (i == hit) ? 0.0 : std::max(0.0, w + step * gamma[i]);
    }

    std::vector<Atom> kept;
    std::vector<Eigen::Index> cols;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].weight > 0.0) {
        kept.push_back(atoms[i]);
        cols.push_back(static_cast<Eigen::Index>(i));
      }
    }
    Matrix next(d + 1, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) next.col(static_cast<Eigen::Index>(j)) = stacked.col(cols[j]);
    atoms = std::move(kept);
    stacked = std::move(next);
  }

  AtomicMeasure out(std::move(atoms));
  const Vector image_after = stacked.topRows(d) * out.weights();
  const double tol = 1e-8 * (1.0 + image_before.norm());
  if ((image_after - image_before).norm() > tol ||
      std::abs(out.total_mass() - mass_before) > 1e-8 * (1.0 + mass_before)) {
    throw NumericalError("caratheodory_prune: reduction lost accuracy (ill-conditioned support)");
  }
  return out;
}

}  // namespace adcg
