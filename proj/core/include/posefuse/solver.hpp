#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "posefuse/pose_graph.hpp"

namespace posefuse {

enum class SolverMethod { GaussNewton, LevenbergMarquardt, Dogleg };
enum class Termination { AbsTol, RelTol, StepTol, MaxIter, TrustRegionCollapse };

std::string_view to_string(SolverMethod method);
std::string_view to_string(Termination termination);

struct SolverConfig {
  SolverMethod method = SolverMethod::Dogleg;
  int max_iterations = 100;
  double abs_error_tol = 1e-18;
  double rel_error_tol = 1e-9;
  double step_tol = 1e-9;
  double trust_region_init = 1e4;
  double lm_lambda_init = 1e-4;

  /// Throws InvalidArgument when a tolerance is non-positive or max_iterations < 1.
  void validate() const;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double initial_error = 0.0;
  double final_error = 0.0;
  Termination termination = Termination::MaxIter;
};

/// One line of the per-iteration trace.
struct IterationRecord {
  int iteration = 0;
  double chi2 = 0.0;
  double step_norm = 0.0;
  double trust_radius = 0.0;
};

/// "iteration chi2 step_norm trust_radius" with 17 significant digits.
std::string format_trace_line(const IterationRecord& record);

using TraceSink = std::function<void(const IterationRecord&)>;

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Gauss-Newton normal equations over the free nodes, ordered by NodeId.
struct LinearSystem {
  SparseMatrix H;
  Eigen::VectorXd b;
  /// Free nodes in block order; block k spans rows 3k..3k+2.
  std::vector<NodeId> free_nodes;
  /// Block index per node, -1 for fixed nodes.
  std::vector<std::ptrdiff_t> block_of;
};

/// H = sum J^T Omega J and b = -sum J^T Omega e over all edges, with fixed
/// nodes eliminated.
LinearSystem build_linear_system(const PoseGraph& graph);

/// Solves H x = b by sparse Cholesky with AMD ordering. On factorization
/// failure retries with H + lambda * D, lambda = 1e-9 escalating by 10 up to
/// 1e-3, where D is diag(H) with zero entries replaced by one. Throws
/// SingularSystem when all attempts fail.
Eigen::VectorXd solve_normal_equations(const SparseMatrix& H, const Eigen::VectorXd& b);

/// Powell dogleg step for the quadratic model with Hessian H and negative
/// gradient b, limited to `trust_radius`.
Eigen::VectorXd dogleg_step(const SparseMatrix& H, const Eigen::VectorXd& b, double trust_radius);

/// Dogleg step assembled from precomputed Gauss-Newton and Cauchy points.
Eigen::VectorXd dogleg_combine(const Eigen::VectorXd& gauss_newton, const Eigen::VectorXd& cauchy,
                               const Eigen::VectorXd& b, double trust_radius);

/// Unconstrained minimizer of the model along b: (b^T b / b^T H b) b.
/// Returns an empty vector when b^T H b is not positive.
Eigen::VectorXd cauchy_point(const SparseMatrix& H, const Eigen::VectorXd& b);

/// Predicted chi-square decrease 2 b^T d - d^T H d of step d.
double predicted_decrease(const SparseMatrix& H, const Eigen::VectorXd& b, const Eigen::VectorXd& step);

/// Applies x <- x (+) step to every free node.
void apply_step(PoseGraph& graph, const LinearSystem& system, const Eigen::VectorXd& step);

/// Minimizes total_error(graph) over the free nodes in place.
SolveReport optimize(PoseGraph& graph, const SolverConfig& config = {}, const TraceSink& trace = {});

}  // namespace posefuse
