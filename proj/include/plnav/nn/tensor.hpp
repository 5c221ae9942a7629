#pragma once

#include <Eigen/Dense>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace plnav::nn {

using Eigen::VectorXd;
using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense n-d array (rank 1..3 in practice), row-major, double precision.
struct Tensor {
  std::vector<int> shape;
  VectorXd data;

  Tensor() = default;

  static Tensor zeros(std::vector<int> shape) {
    Tensor t;
    t.shape = std::move(shape);
    t.data = VectorXd::Zero(numel(t.shape));
    return t;
  }

  static Tensor from(std::vector<int> shape, VectorXd values) {
    if (numel(shape) != values.size()) {
      throw std::invalid_argument("Tensor::from: size mismatch");
    }
    Tensor t;
    t.shape = std::move(shape);
    t.data = std::move(values);
    return t;
  }

  static Tensor scalar(double v) {
    Tensor t;
    t.shape = {1};
    t.data = VectorXd::Constant(1, v);
    return t;
  }

  static Eigen::Index numel(const std::vector<int>& shape) {
    Eigen::Index n = 1;
    for (int d : shape) {
      if (d <= 0) throw std::invalid_argument("Tensor: nonpositive dimension");
      n *= d;
    }
    return n;
  }

  Eigen::Index size() const { return data.size(); }
  int dim(int i) const { return shape.at(i); }
  int rank() const { return static_cast<int>(shape.size()); }

  double& operator[](Eigen::Index i) { return data[i]; }
  double operator[](Eigen::Index i) const { return data[i]; }

  /// 2-D view (requires rank 2).
  Eigen::Map<MatrixRM> mat() {
    return Eigen::Map<MatrixRM>(data.data(), shape.at(0), shape.at(1));
  }
  Eigen::Map<const MatrixRM> mat() const {
    return Eigen::Map<const MatrixRM>(data.data(), shape.at(0), shape.at(1));
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  bool all_finite() const { return data.allFinite(); }
};

}  // namespace plnav::nn
