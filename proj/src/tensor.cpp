// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#include "otloss/tensor.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "otloss/error.hpp"

namespace otloss {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidShape: return "InvalidShape";
    case ErrorKind::InvalidSpan: return "InvalidSpan";
    case ErrorKind::InvalidToken: return "InvalidToken";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::MissingComponent: return "MissingComponent";
    case ErrorKind::UnknownComponent: return "UnknownComponent";
    case ErrorKind::UnparsableIngredient: return "UnparsableIngredient";
    case ErrorKind::UndefinedMetric: return "UndefinedMetric";
    case ErrorKind::EmptyReport: return "EmptyReport";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

Tensor::Tensor(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorKind::InvalidShape,
                fmt::format("shape {}x{} needs {} values, got {}", rows_, cols_, rows_ * cols_,
                            data_.size()));
  }
}

void require_finite(const Tensor& t, const char* what) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t.data()[i])) {
      throw Error(ErrorKind::NumericalFailure,
                  fmt::format("{}: non-finite entry at flat index {}", what, i));
    }
  }
}

Tensor log_softmax_rows(const Tensor& logits) {
  if (logits.empty()) throw Error(ErrorKind::InvalidShape, "softmax of an empty tensor");
  require_finite(logits, "softmax input");
  Tensor out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto in = logits.row(r);
    const double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (double x : in) sum += std::exp(x - mx);
    const double lse = mx + std::log(sum);
    auto o = out.row(r);
    for (std::size_t c = 0; c < in.size(); ++c) o[c] = in[c] - lse;
  }
  return out;
}

Tensor softmax_rows(const Tensor& logits) {
  if (logits.empty()) throw Error(ErrorKind::InvalidShape, "softmax of an empty tensor");
  require_finite(logits, "softmax input");
  Tensor out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto in = logits.row(r);
    auto o = out.row(r);
    const double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      o[c] = std::exp(in[c] - mx);
      sum += o[c];
    }
    for (double& v : o) v /= sum;
  }
  return out;
}

Tensor softmax_rows_backward(const Tensor& probs, const Tensor& grad_probs) {
  if (!probs.same_shape(grad_probs)) {
    throw Error(ErrorKind::InvalidShape,
                fmt::format("softmax backward: probs {}x{} vs grad {}x{}", probs.rows(),
                            probs.cols(), grad_probs.rows(), grad_probs.cols()));
  }
  Tensor out(probs.rows(), probs.cols());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    auto p = probs.row(r);
    auto g = grad_probs.row(r);
    double dot = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) dot += p[c] * g[c];
    auto o = out.row(r);
    for (std::size_t c = 0; c < p.size(); ++c) o[c] = p[c] * (g[c] - dot);
  }
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::InvalidShape, fmt::format("matmul: {}x{} times {}x{}", a.rows(),
                                                     a.cols(), b.rows(), b.cols()));
  }
  Tensor out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto o = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) o[j] += aik * brow[j];
    }
  }
  require_finite(out, "matmul result");
  return out;
}

Tensor transpose(const Tensor& a) {
  Tensor out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

double frobenius_norm(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Tensor& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

Tensor finite_diff_grad(const ScalarFn& f, const Tensor& x, double h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidConfig, "finite difference step must be > 0");
  Tensor grad(x.rows(), x.cols());
  Tensor probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x.data()[i];
    probe.data()[i] = orig + h;
    const double up = f(probe);
    probe.data()[i] = orig - h;
    const double down = f(probe);
    probe.data()[i] = orig;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw Error(ErrorKind::NumericalFailure,
                  fmt::format("finite difference: non-finite evaluation at flat index {}", i));
    }
    grad.data()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double max_relative_error(const Tensor& analytic, const Tensor& numeric, double floor) {
  if (!analytic.same_shape(numeric)) {
    throw Error(ErrorKind::InvalidShape, "max_relative_error: shape mismatch");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic.data()[i];
    const double n = numeric.data()[i];
    const double denom = std::max({std::abs(a), std::abs(n), floor});
    worst = std::max(worst, std::abs(a - n) / denom);
  }
  return worst;
}

}  // namespace otloss
