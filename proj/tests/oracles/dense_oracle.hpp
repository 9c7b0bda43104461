#pragma once

// Brute-force pose-graph solver: residuals from homogeneous matrices,
// Jacobians by central differences, dense normal equations, hand-written
// Cholesky, and a Powell dogleg loop with the same acceptance rules as the
// library.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "se2_oracle.hpp"

namespace oracle {

struct DNode {
  double x = 0, y = 0, t = 0;
  bool fixed = false;
};

struct DEdge {
  int i = 0, j = 0;
  double zx = 0, zy = 0, zt = 0;
  Eigen::Matrix3d info = Eigen::Matrix3d::Identity();
  bool log_residual = true;
};

inline Eigen::Vector3d edge_residual(const DNode& a, const DNode& b, const DEdge& e) {
  if (e.log_residual) {
    const Eigen::Matrix3d m = hom(e.zx, e.zy, e.zt).inverse() * hom(a.x, a.y, a.t).inverse() * hom(b.x, b.y, b.t);
    return logm(m);
  }
  const double c = std::cos(e.zt), s = std::sin(e.zt);
  const double dx = b.x - a.x - e.zx, dy = b.y - a.y - e.zy;
  return {c * dx + s * dy, -s * dx + c * dy, wrap(b.t - a.t - e.zt)};
}

inline DNode perturb(const DNode& n, const Eigen::Vector3d& d) {
  const Xyt p = from_hom(hom(n.x, n.y, n.t) * expm(d.x(), d.y(), d.z()));
  return {p.x, p.y, p.t, n.fixed};
}

inline double chi2(const std::vector<DNode>& nodes, const std::vector<DEdge>& edges) {
  double sum = 0;
  for (const DEdge& e : edges) {
    const Eigen::Vector3d r = edge_residual(nodes[e.i], nodes[e.j], e);
    sum += r.dot(e.info * r);
  }
  return sum;
}

// Plain LL^T; returns nullopt on a non-positive pivot.
inline std::optional<Eigen::VectorXd> cholesky_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0)) return std::nullopt;
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    double s = b(i);
    for (int k = 0; k < i; ++k) s -= l(i, k) * y(k);
    y(i) = s / l(i, i);
  }
  Eigen::VectorXd x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = y(i);
    for (int k = i + 1; k < n; ++k) s -= l(k, i) * x(k);
    x(i) = s / l(i, i);
  }
  return x;
}

inline Eigen::VectorXd regularized_solve(const Eigen::MatrixXd& h, const Eigen::VectorXd& b) {
  if (auto x = cholesky_solve(h, b)) return *x;
  for (double lambda = 1e-9; lambda <= 1e-3 * (1 + 1e-9); lambda *= 10) {
    Eigen::MatrixXd damped = h;
    for (int i = 0; i < h.rows(); ++i) damped(i, i) += lambda * (h(i, i) == 0 ? 1.0 : h(i, i));
    if (auto x = cholesky_solve(damped, b)) return *x;
  }
  throw std::runtime_error("oracle: singular system");
}

struct DenseSystem {
  Eigen::MatrixXd h;
  Eigen::VectorXd b;
  std::vector<int> block;  // -1 for fixed nodes
};

// Central difference of one edge residual along tangent axis k of one endpoint.
inline Eigen::Vector3d central_difference(const std::vector<DNode>& nodes, const DEdge& e, int side, int k, double h) {
  Eigen::Vector3d d = Eigen::Vector3d::Zero();
  d(k) = h;
  DNode ap = nodes[e.i], am = nodes[e.i], bp = nodes[e.j], bm = nodes[e.j];
  if (side == 0) {
    ap = perturb(ap, d);
    am = perturb(am, -d);
  } else {
    bp = perturb(bp, d);
    bm = perturb(bm, -d);
  }
  Eigen::Vector3d diff = edge_residual(ap, bp, e) - edge_residual(am, bm, e);
  diff(2) = wrap(diff(2));
  return diff / (2 * h);
}

// Jacobians by Richardson-extrapolated central differences, error O(h^4).
inline DenseSystem linearize(const std::vector<DNode>& nodes, const std::vector<DEdge>& edges, double h = 1e-3) {
  DenseSystem sys;
  int n = 0;
  for (const DNode& node : nodes) sys.block.push_back(node.fixed ? -1 : n++);
  sys.h = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  sys.b = Eigen::VectorXd::Zero(3 * n);
  for (const DEdge& e : edges) {
    const Eigen::Vector3d r = edge_residual(nodes[e.i], nodes[e.j], e);
    Eigen::Matrix<double, 3, 6> jac;
    for (int side = 0; side < 2; ++side) {
      for (int k = 0; k < 3; ++k) {
        jac.col(3 * side + k) =
            (4.0 * central_difference(nodes, e, side, k, h / 2) - central_difference(nodes, e, side, k, h)) / 3.0;
      }
    }
    const int bi = sys.block[e.i], bj = sys.block[e.j];
    const int idx[2] = {bi, bj};
    for (int s = 0; s < 2; ++s) {
      if (idx[s] < 0) continue;
      const Eigen::Matrix3d js = jac.block<3, 3>(0, 3 * s);
      sys.b.segment<3>(3 * idx[s]) -= js.transpose() * e.info * r;
      for (int t = 0; t < 2; ++t) {
        if (idx[t] < 0) continue;
        const Eigen::Matrix3d jt = jac.block<3, 3>(0, 3 * t);
        sys.h.block<3, 3>(3 * idx[s], 3 * idx[t]) += js.transpose() * e.info * jt;
      }
    }
  }
  return sys;
}

inline std::vector<DNode> step_nodes(const std::vector<DNode>& nodes, const DenseSystem& sys,
                                     const Eigen::VectorXd& step) {
  std::vector<DNode> out = nodes;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (sys.block[k] >= 0) out[k] = perturb(nodes[k], step.segment<3>(3 * sys.block[k]));
  }
  return out;
}

struct DoglegSettings {
  int max_iterations = 100;
  double abs_tol = 1e-18;
  double rel_tol = 1e-9;
  double step_tol = 1e-9;
  double radius = 1e4;
};

inline std::vector<DNode> dense_dogleg(std::vector<DNode> nodes, const std::vector<DEdge>& edges,
                                       const DoglegSettings& cfg = {}) {
  double f = chi2(nodes, edges);
  double radius = cfg.radius;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (f < cfg.abs_tol) break;
    const DenseSystem sys = linearize(nodes, edges);
    const Eigen::VectorXd gn = regularized_solve(sys.h, sys.b);
    if (gn.norm() < cfg.step_tol) break;
    const double bhb = sys.b.dot(sys.h * sys.b);
    const bool have_cauchy = bhb > 0;
    const Eigen::VectorXd cp = have_cauchy ? Eigen::VectorXd((sys.b.squaredNorm() / bhb) * sys.b) : Eigen::VectorXd();
    bool done = false;
    while (true) {
      Eigen::VectorXd step;
      if (gn.norm() <= radius) {
        step = gn;
      } else if (!have_cauchy || cp.norm() >= radius) {
        step = (radius / sys.b.norm()) * sys.b;
      } else {
        // Largest tau in [0, 1] with |cp + tau (gn - cp)| = radius, by bisection.
        double lo = 0, hi = 1;
        for (int k = 0; k < 200; ++k) {
          const double mid = 0.5 * (lo + hi);
          ((cp + mid * (gn - cp)).norm() < radius ? lo : hi) = mid;
        }
        step = cp + 0.5 * (lo + hi) * (gn - cp);
      }
      const double predicted = 2 * sys.b.dot(step) - step.dot(sys.h * step);
      if (predicted <= cfg.rel_tol * f) {
        done = true;
        break;
      }
      const std::vector<DNode> trial_nodes = step_nodes(nodes, sys, step);
      const double trial = chi2(trial_nodes, edges);
      const double gain = (f - trial) / predicted;
      if (gain < 0.25) {
        radius = 0.5 * std::min(radius, step.norm());
      } else if (gain > 0.75) {
        radius = std::min(2 * radius, 1e15);
      }
      if (trial < f) {
        const double prev = f;
        nodes = trial_nodes;
        f = trial;
        done = f < cfg.abs_tol || prev - f <= cfg.rel_tol * prev;
        break;
      }
      if (radius < cfg.step_tol) {
        done = true;
        break;
      }
    }
    if (done) break;
  }
  return nodes;
}

}  // namespace oracle
