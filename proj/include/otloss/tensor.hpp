// Copyright 2026 The otloss Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace otloss {

/// Dense row-major 2-D array of doubles.
///
/// Holds logits (T x V), embedding tables (V x d), probabilities and
/// gradients. Shapes are checked at operation entry; the class itself only
/// guarantees data().size() == rows() * cols().
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols);
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  bool same_shape(const Tensor& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using ScalarFn = std::function<double(const Tensor&)>;

/// Row-wise softmax with per-row max subtraction. Throws InvalidShape on an
/// empty tensor.
Tensor softmax_rows(const Tensor& logits);

/// Row-wise log-softmax, computed as x - max - log(sum exp(x - max)).
Tensor log_softmax_rows(const Tensor& logits);

/// Backward pass of softmax_rows: given probabilities p and dL/dp, returns
/// dL/dlogits = p * (dL/dp - <p, dL/dp>) row by row.
Tensor softmax_rows_backward(const Tensor& probs, const Tensor& grad_probs);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

double frobenius_norm(const Tensor& a);
double max_abs(const Tensor& a);

/// Throws NumericalFailure if any entry is NaN or infinite. `what` names the
/// offending quantity in the message.
void require_finite(const Tensor& t, const char* what);

/// Central finite differences (f(x + h e_ij) - f(x - h e_ij)) / 2h for every
/// entry of x.
Tensor finite_diff_grad(const ScalarFn& f, const Tensor& x, double h = 1e-5);

/// Largest entrywise |a - b| / max(|a|, |b|, floor). Shapes must match.
double max_relative_error(const Tensor& analytic, const Tensor& numeric, double floor = 1e-8);

}  // namespace otloss
