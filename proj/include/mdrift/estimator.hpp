#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <json.hpp>
#include <span>
#include <vector>

#include "mdrift/basis.hpp"
#include "mdrift/core.hpp"

namespace mdrift {

/// Psi_m = (\int_a^T phi_j phi_k d<M>)_{j,k}, with its Cholesky factor.
class GramMatrix {
 public:
  /// Throws SingularDesignError if Cholesky fails or the condition number exceeds 1e12.
  explicit GramMatrix(Eigen::MatrixXd psi);

  std::size_t dim() const { return static_cast<std::size_t>(psi_.rows()); }
  const Eigen::MatrixXd& matrix() const { return psi_; }
  double condition() const { return condition_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return llt_.solve(rhs); }
  /// Psi_m for m <= dim(): the leading block (the families are nested).
  GramMatrix leading(std::size_t m) const;

 private:
  Eigen::MatrixXd psi_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double condition_ = 1.0;
};

/// Gram matrix over [lower, T]; `lower` is the first observation time of the data.
GramMatrix gram_matrix(const BasisFamily& family, std::size_t m, const QuadVarModel& qv,
                       double lower = 0.0);

/// phi_j(t_l) for the estimation nodes l = first_index..n-1 of a grid.
class DesignTable {
 public:
  DesignTable(const BasisFamily& family, std::size_t m, const TimeGrid& grid);

  std::size_t dim() const { return static_cast<std::size_t>(values_.rows()); }
  const TimeGrid& grid() const { return grid_; }

  /// [z]_j = sum_l phi_j(t_l) dX_l for copy-averaged increments dX (length n).
  Eigen::VectorXd project(std::span<const double> pooled) const;

 private:
  TimeGrid grid_;
  Eigen::MatrixXd values_;  // m x (n - first_index)
};

/// z_{m,N,n}: [z]_j = (1/N) sum_i sum_l phi_j(t_l) (Z^i_{t_{l+1}} - Z^i_{t_l}), left-point.
/// Throws DimensionError when m > N.
Eigen::VectorXd project_data(const Ensemble& ensemble, const BasisFamily& family, std::size_t m);

struct CriterionEntry {
  std::size_t dimension = 0;
  double objective = 0.0;  // gamma_N(J_hat_m)
  double penalty = 0.0;
  double criterion = 0.0;
};

enum class PenaltyMode { Fixed, SlopeHeuristic };

struct PenaltyConfig {
  double c_cal = 2.0;
  PenaltyMode mode = PenaltyMode::SlopeHeuristic;
  /// Share of the (largest) dimensions used for the slope regression.
  double window_fraction = 0.5;
};

struct FitResult {
  std::size_t dimension = 0;
  Eigen::VectorXd coefficients;
  double objective = 0.0;
  std::vector<CriterionEntry> trace;
  bool selected = false;
  double c_cal = 0.0;
  PenaltyMode mode = PenaltyMode::Fixed;

  /// J_hat(t) = sum_j theta_j phi_j(t).
  double value(const BasisFamily& family, double t) const;
};

/// theta = Psi_m^{-1} z, gamma_N(J_hat) = -z' theta.
FitResult fit_projection(const Eigen::VectorXd& z, const GramMatrix& gram);

FitResult fit(const Ensemble& ensemble, const BasisFamily& family, std::size_t m,
              const QuadVarModel& qv);

/// pen(m) = c_cal m / N.
double penalty(std::size_t m, std::size_t copies, double c_cal);

/// Twice the least-squares slope of -gamma_N(J_hat_m) against m/N over the upper
/// `fraction` of the (sorted) trace, floored at 1e-6.
double slope_heuristic_constant(std::span<const CriterionEntry> trace, std::size_t copies,
                                double fraction);

/// Penalized selection over `dims` from a projection z of size >= max(dims) and the
/// matching Gram matrix. Ties go to the smallest dimension.
FitResult select_from_projection(const Eigen::VectorXd& z, const GramMatrix& gram,
                                 std::span<const std::size_t> dims, std::size_t copies,
                                 const PenaltyConfig& config);

FitResult select_model(const Ensemble& ensemble, const BasisFamily& family,
                       std::span<const std::size_t> dims, const QuadVarModel& qv,
                       const PenaltyConfig& config);

enum class Norm { QuadVar, L2 };

/// \int_a^b (estimate - truth)^2 dnu with nu = d<M> or dt.
double mise(const RealFunction& estimate, const RealFunction& truth, const QuadVarModel& qv,
            Norm norm, double a, double b);

/// Smallest squared <M>-distance from `truth` to span(phi_1..phi_m) on [a, T].
double projection_bias(const RealFunction& truth, const BasisFamily& family, std::size_t m,
                       const QuadVarModel& qv, double a);

nlohmann::ordered_json to_json(const FitResult& fit);

}  // namespace mdrift
