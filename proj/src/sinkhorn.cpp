// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include "otloss/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "otloss/error.hpp"

namespace otloss {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Marginal violation below which Newton steps are attempted.
constexpr double kNewtonSwitch = 1.0;

double log_weight(double w) { return w > 0.0 ? std::log(w) : kNegInf; }

void validate_weights(std::span<const double> w, const char* which) {
  if (w.empty()) throw Error(ErrorKind::InvalidShape, fmt::format("{} cloud is empty", which));
  double sum = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error(ErrorKind::InvalidShape, fmt::format("{} cloud has a negative weight", which));
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidShape,
                fmt::format("{} cloud weights sum to {:.12g}, expected 1", which, sum));
  }
}

// log sum_k exp(terms[k]), tolerant of -inf entries.
double log_sum_exp(std::span<const double> terms) {
  double mx = kNegInf;
  for (double t : terms) mx = std::max(mx, t);
  if (mx == kNegInf) return kNegInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

// Squared-distance gradient accumulation: for C_ij = |x_i - y_j|^2,
// dC_ij/dx_i = 2 (x_i - y_j).
void accumulate_source_grad(const Tensor& dcost, const Tensor& x, const Tensor& y, Tensor& out,
                            double scale) {
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < y.rows(); ++j) {
      const double w = 2.0 * scale * dcost(i, j);
      if (w == 0.0) continue;
      for (std::size_t k = 0; k < x.cols(); ++k) out(i, k) += w * (x(i, k) - y(j, k));
    }
}

// H = [[diag(P 1), P], [P^T, diag(P^T 1)]], the Jacobian of the marginals
// with respect to (f, g) scaled by epsilon.
Eigen::MatrixXd marginal_hessian(const Tensor& plan) {
  const std::size_t n = plan.rows();
  const std::size_t m = plan.cols();
  const auto N = static_cast<Eigen::Index>(n + m);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(N, N);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double p = plan(i, j);
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(n + j);
      h(ii, ii) += p;
      h(jj, jj) += p;
      h(ii, jj) = p;
      h(jj, ii) = p;
    }
  }
  return h;
}

// Minimum-norm solution of h x = rhs. h is symmetric positive semidefinite
// with the constant gauge direction (1, -1) in its null space.
Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& h, const Eigen::VectorXd& rhs) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
  const Eigen::VectorXd& vals = eig.eigenvalues();
  const Eigen::MatrixXd& vecs = eig.eigenvectors();
  const double cutoff = 1e-12 * std::max(vals.cwiseAbs().maxCoeff(), 1e-300);
  Eigen::VectorXd proj = vecs.transpose() * rhs;
  for (Eigen::Index k = 0; k < proj.size(); ++k) {
    proj(k) = std::abs(vals(k)) > cutoff ? proj(k) / vals(k) : 0.0;
  }
  return vecs * proj;
}

}  // namespace

void SinkhornConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("epsilon must be > 0, got {}", epsilon));
  }
  if (max_iters < 1) throw Error(ErrorKind::InvalidConfig, "max_iters must be >= 1");
  if (!(tolerance > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("tolerance must be > 0, got {}", tolerance));
  }
}

Tensor cost_matrix(const PointCloud& a, const PointCloud& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::InvalidShape,
                fmt::format("cost_matrix: dimension {} vs {}", a.dim(), b.dim()));
  }
  Tensor c(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto x = a.points.row(i);
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto y = b.points.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
      }
      c(i, j) = s;
    }
  }
  return c;
}

TransportResult sinkhorn(const Tensor& cost, std::span<const double> a_weights,
                         std::span<const double> b_weights, const SinkhornConfig& cfg) {
  cfg.validate();
  validate_weights(a_weights, "source");
  validate_weights(b_weights, "target");
  const std::size_t n = a_weights.size();
  const std::size_t m = b_weights.size();
  if (cost.rows() != n || cost.cols() != m) {
    throw Error(ErrorKind::InvalidShape, fmt::format("cost matrix {}x{} for marginals {} and {}",
                                                     cost.rows(), cost.cols(), n, m));
  }
  require_finite(cost, "cost matrix");

  const double eps = cfg.epsilon;
  std::vector<double> log_a(n), log_b(m);
  std::transform(a_weights.begin(), a_weights.end(), log_a.begin(), log_weight);
  std::transform(b_weights.begin(), b_weights.end(), log_b.begin(), log_weight);

  TransportResult res;
  res.f.assign(n, 0.0);
  res.g.assign(m, 0.0);
  res.plan = Tensor(n, m);
  std::vector<double> scratch(std::max(n, m));

  auto fill_plan = [&](const std::vector<double>& f, const std::vector<double>& g, Tensor& plan) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        plan(i, j) = std::exp(log_a[i] + log_b[j] + (f[i] + g[j] - cost(i, j)) / eps);
  };
  // Row then column residuals of a plan, and their L1 norm.
  auto residual = [&](const Tensor& plan, Eigen::VectorXd& r) {
    r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + m));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        r(static_cast<Eigen::Index>(i)) += plan(i, j);
        r(static_cast<Eigen::Index>(n + j)) += plan(i, j);
      }
    }
    for (std::size_t i = 0; i < n; ++i) r(static_cast<Eigen::Index>(i)) -= a_weights[i];
    for (std::size_t j = 0; j < m; ++j) r(static_cast<Eigen::Index>(n + j)) -= b_weights[j];
    return r.lpNorm<1>();
  };

  auto sweep = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) scratch[j] = log_b[j] + (res.g[j] - cost(i, j)) / eps;
      res.f[i] = -eps * log_sum_exp({scratch.data(), m});
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) scratch[i] = log_a[i] + (res.f[i] - cost(i, j)) / eps;
      res.g[j] = -eps * log_sum_exp({scratch.data(), n});
    }
    fill_plan(res.f, res.g, res.plan);
  };

  // Damped Newton step on the potentials, H d = -eps r, kept only when it
  // lowers the marginal violation left by the preceding sweep.
  Tensor trial_plan(n, m);
  std::vector<double> trial_f(n), trial_g(m);
  Eigen::VectorXd r, trial_r;
  auto newton = [&](double violation) {
    const Eigen::VectorXd step = pinv_solve(marginal_hessian(res.plan), -eps * r);
    for (double t = 1.0; t >= 1.0 / 64.0; t *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) trial_f[i] = res.f[i] + t * step(static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < m; ++j) {
        trial_g[j] = res.g[j] + t * step(static_cast<Eigen::Index>(n + j));
      }
      fill_plan(trial_f, trial_g, trial_plan);
      const double v = residual(trial_plan, trial_r);
      if (std::isfinite(v) && v < violation) {
        res.f.swap(trial_f);
        res.g.swap(trial_g);
        std::swap(res.plan, trial_plan);
        r.swap(trial_r);
        return v;
      }
    }
    return -1.0;
  };

  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    sweep();
    double violation = residual(res.plan, r);
    if (violation > cfg.tolerance && violation < kNewtonSwitch) {
      const double refined = newton(violation);
      if (refined >= 0.0) violation = refined;
    }
    res.iterations_used = it;
    if (violation <= cfg.tolerance) {
      res.converged = true;
      break;
    }
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) total += res.plan(i, j) * cost(i, j);
  if (!std::isfinite(total)) throw Error(ErrorKind::NumericalFailure, "non-finite transport cost");
  res.cost = total;
  return res;
}

TransportResult sinkhorn(const PointCloud& a, const PointCloud& b, const SinkhornConfig& cfg) {
  return sinkhorn(cost_matrix(a, b), a.weights, b.weights, cfg);
}

Tensor transport_cost_gradient(const TransportResult& result, const Tensor& cost,
                               double epsilon) {
  const Tensor& plan = result.plan;
  const std::size_t n = plan.rows();
  const std::size_t m = plan.cols();
  if (!cost.same_shape(plan)) {
    throw Error(ErrorKind::InvalidShape, "transport_cost_gradient: cost/plan shape mismatch");
  }

  // Linearized marginal constraints: H [df; dg] = [P dC 1; P^T dC 1]. The
  // adjoint solve H lambda = w carries the cost's sensitivity to the
  // potentials.
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double pc = plan(i, j) * cost(i, j) / epsilon;
      w(static_cast<Eigen::Index>(i)) += pc;
      w(static_cast<Eigen::Index>(n + j)) += pc;
    }
  }
  const Eigen::VectorXd lambda = pinv_solve(marginal_hessian(plan), w);

  Tensor grad(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      grad(i, j) = plan(i, j) * (1.0 - cost(i, j) / epsilon + lambda(static_cast<Eigen::Index>(i)) +
                                 lambda(static_cast<Eigen::Index>(n + j)));
    }
  return grad;
}

double sinkhorn_divergence(const PointCloud& a, const PointCloud& b, const SinkhornConfig& cfg) {
  const double ab = sinkhorn(a, b, cfg).cost;
  const double aa = sinkhorn(a, a, cfg).cost;
  const double bb = sinkhorn(b, b, cfg).cost;
  return ab - 0.5 * aa - 0.5 * bb;
}

DivergenceResult sinkhorn_divergence_with_grad(const PointCloud& a, const PointCloud& b,
                                               const SinkhornConfig& cfg) {
  const Tensor c_ab = cost_matrix(a, b);
  const Tensor c_aa = cost_matrix(a, a);
  const Tensor c_bb = cost_matrix(b, b);
  const TransportResult ab = sinkhorn(c_ab, a.weights, b.weights, cfg);
  const TransportResult aa = sinkhorn(c_aa, a.weights, a.weights, cfg);
  const TransportResult bb = sinkhorn(c_bb, b.weights, b.weights, cfg);

  DivergenceResult out;
  out.value = ab.cost - 0.5 * aa.cost - 0.5 * bb.cost;
  out.converged = ab.converged && aa.converged && bb.converged;
  out.grad_points = Tensor(a.size(), a.dim());

  const Tensor g_ab = transport_cost_gradient(ab, c_ab, cfg.epsilon);
  const Tensor g_aa = transport_cost_gradient(aa, c_aa, cfg.epsilon);
  accumulate_source_grad(g_ab, a.points, b.points, out.grad_points, 1.0);
  // In the self term both indices move with a.
  accumulate_source_grad(g_aa, a.points, a.points, out.grad_points, -0.5);
  accumulate_source_grad(transpose(g_aa), a.points, a.points, out.grad_points, -0.5);
  require_finite(out.grad_points, "divergence gradient");
  return out;
}

LossResult topological_loss(const Tensor& logits, std::span<const TokenId> target_ids,
                            const Tensor& embeddings, const SpanMask& span_pred,
                            const SpanMask& span_target, const SinkhornConfig& cfg) {
  const PointCloud pred = soft_cloud(logits, embeddings, span_pred);
  const PointCloud target = hard_cloud(target_ids, embeddings, span_target);
  const DivergenceResult div = sinkhorn_divergence_with_grad(pred, target, cfg);

  Tensor spanned(span_pred.length(), logits.cols());
  for (std::size_t t = span_pred.start; t < span_pred.end; ++t) {
    auto src = logits.row(t);
    std::copy(src.begin(), src.end(), spanned.row(t - span_pred.start).begin());
  }
  const Tensor probs = softmax_rows(spanned);
  // soft point = p . E, so dS/dp = dS/dpoint . E^T
  const Tensor grad_probs = matmul(div.grad_points, transpose(embeddings));
  const Tensor grad_span = softmax_rows_backward(probs, grad_probs);

  LossResult out{div.value, Tensor(logits.rows(), logits.cols())};
  for (std::size_t t = span_pred.start; t < span_pred.end; ++t) {
    auto src = grad_span.row(t - span_pred.start);
    std::copy(src.begin(), src.end(), out.grad.row(t).begin());
  }
  return out;
}

}  // namespace otloss
