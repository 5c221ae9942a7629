#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "plnav/nn/tensor.hpp"

namespace plnav::nn {

/// Learnable tensor with persistent gradient and Adam state.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor adam_m;
  Tensor adam_v;

  explicit Param(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)) {
    grad = Tensor::zeros(value.shape);
    adam_m = Tensor::zeros(value.shape);
    adam_v = Tensor::zeros(value.shape);
  }
};

/// Reverse-mode tape over whole-tensor operations. Nodes are created in
/// topological order by construction; backward() walks them in reverse.
/// Gradients of Param leaves accumulate into Param::grad.
class Graph {
 public:
  using Id = int;

  /// Leaf without gradient tracking.
  Id constant(Tensor t);
  /// Leaf with gradient tracking (inputs under test).
  Id input(Tensor t);
  /// Leaf bound to a Param; repeated calls for the same Param within one
  /// graph return the same node.
  Id param(Param& p);

  const Tensor& value(Id id) const { return nodes_[id].val; }
  const Tensor& grad_of(Id id) const { return nodes_[id].grad; }

  // Elementwise (shapes must match exactly).
  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  Id mul(Id a, Id b);
  Id scale(Id a, double s);
  Id add_scalar(Id a, double s);
  Id relu(Id a);
  Id sigmoid(Id a);
  Id tanh_(Id a);
  Id exp_(Id a);
  Id square(Id a);
  Id minimum(Id a, Id b);            // gradient follows the selected side
  Id clamp(Id a, double lo, double hi);  // zero gradient outside [lo, hi]

  // Linear algebra on [B, m] matrices.
  Id matmul(Id x, Id w);              // [B,m] x [m,n] -> [B,n]
  Id add_row(Id x, Id bias);          // [B,n] + [n] broadcast over rows
  Id broadcast_row(Id row, int rows); // [n] -> [rows,n]
  Id concat_cols(Id a, Id b);         // [B,m] ++ [B,n] -> [B,m+n]
  Id slice_cols(Id x, int start, int len);

  // 1-D convolution over the last axis of [B, C, L].
  Id conv1d(Id x, Id w, Id bias, int stride, int pad);   // w: [Co,Ci,K]
  Id deconv1d(Id x, Id w, Id bias, int stride, int pad,  // w: [Ci,Co,K]
              int out_pad);

  Id reshape(Id x, std::vector<int> shape);
  Id sum(Id x);                  // -> [1]
  Id mean_weighted(Id x, Tensor weights);  // sum(x .* w) / sum(w), w constant

  /// Seeds d(root)/d(root) = 1 (root must be a scalar) and accumulates
  /// gradients through the tape. May be called once per graph.
  void backward(Id root);

  size_t num_nodes() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor val;
    Tensor grad;
    bool needs_grad = false;
    Param* bound = nullptr;
    std::function<void(Graph&)> back;
  };

  Id emplace(Tensor val, bool needs_grad, std::function<void(Graph&)> back);
  Tensor& grad_mut(Id id) { return nodes_[id].grad; }
  bool needs(Id id) const { return nodes_[id].needs_grad; }

  std::vector<Node> nodes_;
  std::unordered_map<const Param*, Id> param_nodes_;
};

}  // namespace plnav::nn
