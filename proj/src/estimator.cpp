#include "mdrift/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mdrift {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kSlopeFloor = 1e-6;

double eigen_condition(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

GramMatrix::GramMatrix(Eigen::MatrixXd psi) : psi_(std::move(psi)) {
  if (psi_.rows() != psi_.cols() || psi_.rows() == 0) {
    throw DimensionError("Gram matrix must be square and non-empty");
  }
  condition_ = eigen_condition(psi_);
  llt_.compute(psi_);
  if (llt_.info() != Eigen::Success || !(condition_ <= kMaxCondition)) {
    throw SingularDesignError("Gram matrix is singular (m = " + std::to_string(psi_.rows()) +
                              ", condition estimate " + std::to_string(condition_) + ")");
  }
}

GramMatrix GramMatrix::leading(std::size_t m) const {
  if (m == 0 || m > dim()) throw DimensionError("leading block size out of range");
  const auto k = static_cast<Eigen::Index>(m);
  return GramMatrix(psi_.topLeftCorner(k, k));
}

GramMatrix gram_matrix(const BasisFamily& family, std::size_t m, const QuadVarModel& qv,
                       double lower) {
  if (m == 0 || m > family.max_dim()) {
    throw DimensionError("dimension " + std::to_string(m) + " outside the family range");
  }
  const auto dim = static_cast<Eigen::Index>(m);
  const double upper = qv.horizon();
  Eigen::MatrixXd psi(dim, dim);
  for (std::size_t j = 1; j <= m; ++j) {
    for (std::size_t k = 1; k <= j; ++k) {
      auto f = [&](double s) { return family(j, s) * family(k, s); };
      const double v = integrate_dqv(f, qv, lower, upper);
      psi(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(k - 1)) = v;
      psi(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(j - 1)) = v;
    }
  }
  return GramMatrix(std::move(psi));
}

DesignTable::DesignTable(const BasisFamily& family, std::size_t m, const TimeGrid& grid)
    : grid_(grid) {
  if (m == 0 || m > family.max_dim()) throw DimensionError("dimension outside the family range");
  const std::size_t first = grid.first_index();
  const std::size_t count = grid.steps() - first;
  values_.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(count));
  std::vector<double> buf(m);
  for (std::size_t c = 0; c < count; ++c) {
    family.evaluate(m, grid[first + c], buf);
    for (std::size_t j = 0; j < m; ++j) {
      values_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) = buf[j];
    }
  }
}

Eigen::VectorXd DesignTable::project(std::span<const double> pooled) const {
  if (pooled.size() != grid_.steps()) throw DimensionError("increments do not match the grid");
  const std::size_t first = grid_.first_index();
  const Eigen::Map<const Eigen::VectorXd> incr(pooled.data() + first, values_.cols());
  return values_ * incr;
}

Eigen::VectorXd project_data(const Ensemble& ensemble, const BasisFamily& family, std::size_t m) {
  if (m > ensemble.size()) {
    throw DimensionError("dimension m = " + std::to_string(m) + " exceeds the number of copies " +
                         std::to_string(ensemble.size()));
  }
  const DesignTable table(family, m, ensemble.grid());
  return table.project(pooled_increments(ensemble));
}

double FitResult::value(const BasisFamily& family, double t) const {
  return family.expand(std::span<const double>(coefficients.data(), coefficients.size()), t);
}

FitResult fit_projection(const Eigen::VectorXd& z, const GramMatrix& gram) {
  if (static_cast<std::size_t>(z.size()) != gram.dim()) {
    throw DimensionError("projection and Gram matrix sizes differ");
  }
  FitResult out;
  out.dimension = gram.dim();
  out.coefficients = gram.solve(z);
  out.objective = -z.dot(out.coefficients);
  return out;
}

FitResult fit(const Ensemble& ensemble, const BasisFamily& family, std::size_t m,
              const QuadVarModel& qv) {
  const Eigen::VectorXd z = project_data(ensemble, family, m);
  return fit_projection(z, gram_matrix(family, m, qv, ensemble.grid().start()));
}

double penalty(std::size_t m, std::size_t copies, double c_cal) {
  if (copies == 0) throw DomainError("penalty needs at least one copy");
  return c_cal * static_cast<double>(m) / static_cast<double>(copies);
}

double slope_heuristic_constant(std::span<const CriterionEntry> trace, std::size_t copies,
                                double fraction) {
  if (trace.size() < 2) throw DomainError("slope heuristic needs at least two dimensions");
  std::vector<CriterionEntry> sorted(trace.begin(), trace.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.dimension < b.dimension; });
  const auto wanted = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(sorted.size())));
  const std::size_t count = std::clamp<std::size_t>(wanted, 2, sorted.size());
  const std::size_t begin = sorted.size() - count;

  double mx = 0.0, my = 0.0;
  for (std::size_t k = begin; k < sorted.size(); ++k) {
    mx += static_cast<double>(sorted[k].dimension) / static_cast<double>(copies);
    my += -sorted[k].objective;
  }
  mx /= static_cast<double>(count);
  my /= static_cast<double>(count);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = begin; k < sorted.size(); ++k) {
    const double dx = static_cast<double>(sorted[k].dimension) / static_cast<double>(copies) - mx;
    sxy += dx * (-sorted[k].objective - my);
    sxx += dx * dx;
  }
  return std::max(2.0 * sxy / sxx, kSlopeFloor);
}

FitResult select_from_projection(const Eigen::VectorXd& z, const GramMatrix& gram,
                                 std::span<const std::size_t> dims, std::size_t copies,
                                 const PenaltyConfig& config) {
  if (dims.empty()) throw DomainError("the model collection is empty");
  std::vector<std::size_t> sorted(dims.begin(), dims.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.front() == 0) throw DomainError("dimensions start at 1");
  if (sorted.back() > copies) {
    throw DimensionError("dimension " + std::to_string(sorted.back()) +
                         " exceeds the number of copies " + std::to_string(copies));
  }
  if (sorted.back() > static_cast<std::size_t>(z.size()) || sorted.back() > gram.dim()) {
    throw DimensionError("projection too short for the model collection");
  }

  std::vector<FitResult> fits;
  std::vector<CriterionEntry> trace;
  for (std::size_t m : sorted) {
    const auto k = static_cast<Eigen::Index>(m);
    FitResult f = fit_projection(z.head(k), gram.leading(m));
    trace.push_back({m, f.objective, 0.0, 0.0});
    fits.push_back(std::move(f));
  }

  double c_cal = config.c_cal;
  if (config.mode == PenaltyMode::SlopeHeuristic && trace.size() >= 2) {
    c_cal = slope_heuristic_constant(trace, copies, config.window_fraction);
  }
  if (!(c_cal > 0.0)) throw DomainError("penalty constant must be positive");

  std::size_t best = 0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    trace[k].penalty = penalty(trace[k].dimension, copies, c_cal);
    trace[k].criterion = trace[k].objective + trace[k].penalty;
    if (trace[k].criterion < trace[best].criterion) best = k;
  }

  FitResult out = std::move(fits[best]);
  out.trace = std::move(trace);
  out.selected = true;
  out.c_cal = c_cal;
  out.mode = config.mode;
  return out;
}

FitResult select_model(const Ensemble& ensemble, const BasisFamily& family,
                       std::span<const std::size_t> dims, const QuadVarModel& qv,
                       const PenaltyConfig& config) {
  if (dims.empty()) throw DomainError("the model collection is empty");
  const std::size_t top = *std::max_element(dims.begin(), dims.end());
  const Eigen::VectorXd z = project_data(ensemble, family, top);
  const GramMatrix gram = gram_matrix(family, top, qv, ensemble.grid().start());
  return select_from_projection(z, gram, dims, ensemble.size(), config);
}

double mise(const RealFunction& estimate, const RealFunction& truth, const QuadVarModel& qv,
            Norm norm, double a, double b) {
  auto sq = [&](double s) {
    const double d = estimate(s) - truth(s);
    return d * d;
  };
  const double v = norm == Norm::QuadVar ? integrate_dqv(sq, qv, a, b) : integrate_dt(sq, a, b);
  if (!std::isfinite(v)) throw NumericError("integrated squared error is not finite");
  return v;
}

double projection_bias(const RealFunction& truth, const BasisFamily& family, std::size_t m,
                       const QuadVarModel& qv, double a) {
  const GramMatrix gram = gram_matrix(family, m, qv, a);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(m));
  for (std::size_t j = 1; j <= m; ++j) {
    rhs(static_cast<Eigen::Index>(j - 1)) =
        integrate_dqv([&](double s) { return family(j, s) * truth(s); }, qv, a, qv.horizon());
  }
  const Eigen::VectorXd theta = gram.solve(rhs);
  auto proj = [&](double s) {
    return family.expand(std::span<const double>(theta.data(), theta.size()), s);
  };
  return mise(proj, truth, qv, Norm::QuadVar, a, qv.horizon());
}

nlohmann::ordered_json to_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["m_hat"] = fit.dimension;
  j["selected"] = fit.selected;
  j["c_cal"] = fit.c_cal;
  j["penalty_mode"] = fit.mode == PenaltyMode::Fixed ? "fixed" : "slope";
  j["objective"] = fit.objective;
  j["theta"] = std::vector<double>(fit.coefficients.data(),
                                   fit.coefficients.data() + fit.coefficients.size());
  auto trace = nlohmann::ordered_json::array();
  for (const auto& e : fit.trace) {
    trace.push_back({{"m", e.dimension},
                     {"objective", e.objective},
                     {"penalty", e.penalty},
                     {"criterion", e.criterion}});
  }
  j["trace"] = trace;
  return j;
}

}  // namespace mdrift
