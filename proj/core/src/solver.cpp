#include "posefuse/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include "posefuse/error.hpp"

namespace posefuse {

namespace {

constexpr double kRegularizationStart = 1e-9;
constexpr double kRegularizationMax = 1e-3;
constexpr double kMaxTrustRadius = 1e15;
constexpr double kMaxLambda = 1e12;
constexpr double kMinLambda = 1e-15;

using Cholesky = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

bool try_solve(const SparseMatrix& A, const Eigen::VectorXd& b, Eigen::VectorXd& x) {
  Cholesky chol(A);
  if (chol.info() != Eigen::Success) {
    return false;
  }
  x = chol.solve(b);
  return chol.info() == Eigen::Success && x.allFinite();
}

Eigen::VectorXd damping_diagonal(const SparseMatrix& H) {
  Eigen::VectorXd d = H.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) {
      d[i] = 1.0;
    }
  }
  return d;
}

SparseMatrix add_diagonal(const SparseMatrix& H, const Eigen::VectorXd& d) {
  SparseMatrix diag(H.rows(), H.cols());
  diag.reserve(Eigen::VectorXi::Constant(H.cols(), 1));
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    diag.insert(i, i) = d[i];
  }
  return H + diag;
}

void check_informed(const LinearSystem& system) {
  const Eigen::VectorXd diag = system.H.diagonal();
  for (std::size_t k = 0; k < system.free_nodes.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(3 * k);
    if (diag[row] == 0.0 && diag[row + 1] == 0.0 && diag[row + 2] == 0.0) {
      throw Error(ErrorCode::SingularSystem,
                  fmt::format("free node {} receives no information", system.free_nodes[k].index));
    }
  }
}

std::vector<Pose2> snapshot(const PoseGraph& graph, const LinearSystem& system) {
  std::vector<Pose2> poses;
  poses.reserve(system.free_nodes.size());
  for (NodeId id : system.free_nodes) {
    poses.push_back(graph.node(id).pose);
  }
  return poses;
}

void restore(PoseGraph& graph, const LinearSystem& system, const std::vector<Pose2>& poses) {
  for (std::size_t k = 0; k < poses.size(); ++k) {
    graph.set_pose(system.free_nodes[k], poses[k]);
  }
}

void emit(const TraceSink& trace, int iteration, double chi2, double step_norm, double radius) {
  if (trace) {
    trace(IterationRecord{iteration, chi2, step_norm, radius});
  }
}

struct Finish {
  Termination termination;
  bool converged;
};

SolveReport run_dogleg(PoseGraph& graph, const SolverConfig& config, const TraceSink& trace) {
  SolveReport report;
  double chi2 = total_error(graph);
  report.initial_error = chi2;
  double radius = config.trust_region_init;
  std::optional<Finish> finish;

  for (int it = 1; it <= config.max_iterations && !finish; ++it) {
    report.iterations = it;
    if (chi2 < config.abs_error_tol) {
      finish = Finish{Termination::AbsTol, true};
      break;
    }
    const LinearSystem system = build_linear_system(graph);
    check_informed(system);
    const Eigen::VectorXd gn = solve_normal_equations(system.H, system.b);
    if (gn.norm() < config.step_tol) {
      finish = Finish{Termination::StepTol, true};
      break;
    }
    const Eigen::VectorXd cauchy = cauchy_point(system.H, system.b);
    const std::vector<Pose2> saved = snapshot(graph, system);

    while (true) {
      const Eigen::VectorXd step = dogleg_combine(gn, cauchy, system.b, radius);
      const double step_norm = step.norm();
      const double predicted = predicted_decrease(system.H, system.b, step);
      if (predicted <= config.rel_error_tol * chi2) {
        finish = Finish{Termination::RelTol, true};
        break;
      }
      apply_step(graph, system, step);
      const double trial = total_error(graph);
      const double gain = (chi2 - trial) / predicted;

      if (gain < 0.25) {
        radius = 0.5 * std::min(radius, step_norm);
      } else if (gain > 0.75) {
        radius = std::min(2.0 * radius, kMaxTrustRadius);
      }

      if (trial < chi2) {
        const double decrease = chi2 - trial;
        const double previous = chi2;
        chi2 = trial;
        emit(trace, it, chi2, step_norm, radius);
        if (chi2 < config.abs_error_tol) {
          finish = Finish{Termination::AbsTol, true};
        } else if (decrease <= config.rel_error_tol * previous) {
          finish = Finish{Termination::RelTol, true};
        }
        break;
      }
      restore(graph, system, saved);
      if (radius < config.step_tol) {
        finish = Finish{Termination::TrustRegionCollapse, false};
        break;
      }
    }
  }

  report.final_error = chi2;
  if (finish) {
    report.termination = finish->termination;
    report.converged = finish->converged;
  } else {
    report.termination = Termination::MaxIter;
    report.converged = false;
  }
  return report;
}

SolveReport run_levenberg_marquardt(PoseGraph& graph, const SolverConfig& config, const TraceSink& trace) {
  SolveReport report;
  double chi2 = total_error(graph);
  report.initial_error = chi2;
  double lambda = config.lm_lambda_init;
  std::optional<Finish> finish;

  for (int it = 1; it <= config.max_iterations && !finish; ++it) {
    report.iterations = it;
    if (chi2 < config.abs_error_tol) {
      finish = Finish{Termination::AbsTol, true};
      break;
    }
    const LinearSystem system = build_linear_system(graph);
    check_informed(system);
    const Eigen::VectorXd scale = damping_diagonal(system.H);
    const std::vector<Pose2> saved = snapshot(graph, system);

    while (true) {
      const Eigen::VectorXd step = solve_normal_equations(add_diagonal(system.H, lambda * scale), system.b);
      const double step_norm = step.norm();
      if (step_norm < config.step_tol) {
        finish = Finish{Termination::StepTol, true};
        break;
      }
      const double predicted = predicted_decrease(system.H, system.b, step);
      if (predicted <= config.rel_error_tol * chi2) {
        finish = Finish{Termination::RelTol, true};
        break;
      }
      apply_step(graph, system, step);
      const double trial = total_error(graph);
      if (trial < chi2) {
        const double decrease = chi2 - trial;
        const double previous = chi2;
        chi2 = trial;
        lambda = std::max(lambda / 10.0, kMinLambda);
        emit(trace, it, chi2, step_norm, lambda);
        if (chi2 < config.abs_error_tol) {
          finish = Finish{Termination::AbsTol, true};
        } else if (decrease <= config.rel_error_tol * previous) {
          finish = Finish{Termination::RelTol, true};
        }
        break;
      }
      restore(graph, system, saved);
      lambda *= 10.0;
      if (lambda > kMaxLambda) {
        finish = Finish{Termination::TrustRegionCollapse, false};
        break;
      }
    }
  }

  report.final_error = chi2;
  report.termination = finish ? finish->termination : Termination::MaxIter;
  report.converged = finish ? finish->converged : false;
  return report;
}

SolveReport run_gauss_newton(PoseGraph& graph, const SolverConfig& config, const TraceSink& trace) {
  SolveReport report;
  double chi2 = total_error(graph);
  report.initial_error = chi2;
  std::optional<Finish> finish;

  for (int it = 1; it <= config.max_iterations; ++it) {
    report.iterations = it;
    if (chi2 < config.abs_error_tol) {
      finish = Finish{Termination::AbsTol, true};
      break;
    }
    const LinearSystem system = build_linear_system(graph);
    check_informed(system);
    const Eigen::VectorXd step = solve_normal_equations(system.H, system.b);
    if (step.norm() < config.step_tol) {
      finish = Finish{Termination::StepTol, true};
      break;
    }
    apply_step(graph, system, step);
    const double next = total_error(graph);
    emit(trace, it, next, step.norm(), 0.0);
    const double change = std::abs(chi2 - next);
    const double previous = chi2;
    chi2 = next;
    if (chi2 < config.abs_error_tol) {
      finish = Finish{Termination::AbsTol, true};
      break;
    }
    if (change <= config.rel_error_tol * previous) {
      finish = Finish{Termination::RelTol, true};
      break;
    }
  }

  report.final_error = chi2;
  report.termination = finish ? finish->termination : Termination::MaxIter;
  report.converged = finish ? finish->converged : false;
  return report;
}

}  // namespace

std::string_view to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::GaussNewton: return "GaussNewton";
    case SolverMethod::LevenbergMarquardt: return "LevenbergMarquardt";
    case SolverMethod::Dogleg: return "Dogleg";
  }
  return "Dogleg";
}

std::string_view to_string(Termination termination) {
  switch (termination) {
    case Termination::AbsTol: return "AbsTol";
    case Termination::RelTol: return "RelTol";
    case Termination::StepTol: return "StepTol";
    case Termination::MaxIter: return "MaxIter";
    case Termination::TrustRegionCollapse: return "TrustRegionCollapse";
  }
  return "MaxIter";
}

void SolverConfig::validate() const {
  if (max_iterations < 1) {
    throw Error(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
  }
  if (!(abs_error_tol > 0) || !(rel_error_tol > 0) || !(step_tol > 0) || !(trust_region_init > 0) ||
      !(lm_lambda_init > 0)) {
    throw Error(ErrorCode::InvalidArgument, "solver tolerances must be positive");
  }
}

std::string format_trace_line(const IterationRecord& r) {
  return fmt::format("{} {:.17g} {:.17g} {:.17g}", r.iteration, r.chi2, r.step_norm, r.trust_radius);
}

LinearSystem build_linear_system(const PoseGraph& graph) {
  LinearSystem system;
  system.block_of.assign(graph.nodes().size(), -1);
  for (const Node& n : graph.nodes()) {
    if (!n.fixed) {
      system.block_of[n.id.index] = static_cast<std::ptrdiff_t>(system.free_nodes.size());
      system.free_nodes.push_back(n.id);
    }
  }
  const auto dim = static_cast<Eigen::Index>(3 * system.free_nodes.size());
  system.b = Eigen::VectorXd::Zero(dim);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(graph.edges().size() * 36);
  auto add_block = [&](std::ptrdiff_t row_block, std::ptrdiff_t col_block, const Eigen::Matrix3d& m) {
    const auto r0 = static_cast<int>(3 * row_block);
    const auto c0 = static_cast<int>(3 * col_block);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        triplets.emplace_back(r0 + r, c0 + c, m(r, c));
      }
    }
  };

  for (const Edge& edge : graph.edges()) {
    const std::ptrdiff_t bi = system.block_of[edge.from.index];
    const std::ptrdiff_t bj = system.block_of[edge.to.index];
    if (bi < 0 && bj < 0) {
      continue;
    }
    const Eigen::Vector3d e = residual(graph, edge).vector();
    const EdgeJacobians jac = jacobians(graph, edge);
    const Eigen::Matrix3d& omega = edge.information;
    const Eigen::Vector3d omega_e = omega * e;
    if (bi >= 0) {
      const Eigen::Matrix3d jt_omega = jac.wrt_from.transpose() * omega;
      add_block(bi, bi, jt_omega * jac.wrt_from);
      system.b.segment<3>(3 * bi) -= jac.wrt_from.transpose() * omega_e;
      if (bj >= 0) {
        const Eigen::Matrix3d cross = jt_omega * jac.wrt_to;
        add_block(bi, bj, cross);
        add_block(bj, bi, cross.transpose());
      }
    }
    if (bj >= 0) {
      add_block(bj, bj, jac.wrt_to.transpose() * omega * jac.wrt_to);
      system.b.segment<3>(3 * bj) -= jac.wrt_to.transpose() * omega_e;
    }
  }

  system.H.resize(dim, dim);
  system.H.setFromTriplets(triplets.begin(), triplets.end());
  return system;
}

Eigen::VectorXd solve_normal_equations(const SparseMatrix& H, const Eigen::VectorXd& b) {
  if (!b.allFinite()) {
    throw Error(ErrorCode::SingularSystem, "right-hand side is not finite");
  }
  Eigen::VectorXd x;
  if (try_solve(H, b, x)) {
    return x;
  }
  const Eigen::VectorXd scale = damping_diagonal(H);
  for (double lambda = kRegularizationStart; lambda <= kRegularizationMax * 1.0000001; lambda *= 10.0) {
    if (try_solve(add_diagonal(H, lambda * scale), b, x)) {
      return x;
    }
  }
  throw Error(ErrorCode::SingularSystem, "normal equations are rank deficient beyond regularization");
}

Eigen::VectorXd cauchy_point(const SparseMatrix& H, const Eigen::VectorXd& b) {
  const double curvature = b.dot(H * b);
  if (!(curvature > 0.0)) {
    return {};
  }
  return (b.squaredNorm() / curvature) * b;
}

Eigen::VectorXd dogleg_combine(const Eigen::VectorXd& gauss_newton, const Eigen::VectorXd& cauchy,
                               const Eigen::VectorXd& b, double trust_radius) {
  if (gauss_newton.norm() <= trust_radius) {
    return gauss_newton;
  }
  const double b_norm = b.norm();
  if (cauchy.size() == 0 || cauchy.norm() >= trust_radius) {
    if (b_norm == 0.0) {
      return Eigen::VectorXd::Zero(b.size());
    }
    return (trust_radius / b_norm) * b;
  }
  // Point on the segment cauchy -> gauss_newton at distance trust_radius.
  const Eigen::VectorXd d = gauss_newton - cauchy;
  const double a = d.squaredNorm();
  const double half_b = cauchy.dot(d);
  const double c = cauchy.squaredNorm() - trust_radius * trust_radius;
  const double disc = std::sqrt(std::max(half_b * half_b - a * c, 0.0));
  const double tau = half_b >= 0.0 ? -c / (half_b + disc) : (disc - half_b) / a;
  return cauchy + tau * d;
}

Eigen::VectorXd dogleg_step(const SparseMatrix& H, const Eigen::VectorXd& b, double trust_radius) {
  const Eigen::VectorXd gn = solve_normal_equations(H, b);
  return dogleg_combine(gn, cauchy_point(H, b), b, trust_radius);
}

double predicted_decrease(const SparseMatrix& H, const Eigen::VectorXd& b, const Eigen::VectorXd& step) {
  return 2.0 * b.dot(step) - step.dot(H * step);
}

void apply_step(PoseGraph& graph, const LinearSystem& system, const Eigen::VectorXd& step) {
  for (std::size_t k = 0; k < system.free_nodes.size(); ++k) {
    const NodeId id = system.free_nodes[k];
    const Eigen::Vector3d delta = step.segment<3>(static_cast<Eigen::Index>(3 * k));
    graph.set_pose(id, retract(graph.node(id).pose, Tangent3::from_vector(delta)));
  }
}

SolveReport optimize(PoseGraph& graph, const SolverConfig& config, const TraceSink& trace) {
  config.validate();
  if (graph.fixed_count() == 0) {
    throw Error(ErrorCode::GaugeUnderconstrained, "pose graph has no fixed node");
  }
  if (graph.free_count() == 0) {
    throw Error(ErrorCode::InvalidArgument, "pose graph has no free node to optimize");
  }
  switch (config.method) {
    case SolverMethod::GaussNewton: return run_gauss_newton(graph, config, trace);
    case SolverMethod::LevenbergMarquardt: return run_levenberg_marquardt(graph, config, trace);
    case SolverMethod::Dogleg: return run_dogleg(graph, config, trace);
  }
  return {};
}

}  // namespace posefuse
