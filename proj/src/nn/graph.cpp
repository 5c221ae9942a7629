#include "plnav/nn/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace plnav::nn {

namespace {

inline Eigen::Index idx3(int b, int c, int l, int C, int L) {
  return (static_cast<Eigen::Index>(b) * C + c) * L + l;
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

Graph::Id Graph::emplace(Tensor val, bool needs_grad, std::function<void(Graph&)> back) {
  Node node;
  node.val = std::move(val);
  node.needs_grad = needs_grad;
  node.back = std::move(back);
  if (needs_grad) node.grad = Tensor::zeros(node.val.shape);
  nodes_.push_back(std::move(node));
  return static_cast<Id>(nodes_.size() - 1);
}

Graph::Id Graph::constant(Tensor t) { return emplace(std::move(t), false, nullptr); }

Graph::Id Graph::input(Tensor t) { return emplace(std::move(t), true, nullptr); }

Graph::Id Graph::param(Param& p) {
  auto it = param_nodes_.find(&p);
  if (it != param_nodes_.end()) return it->second;
  Id id = emplace(p.value, true, nullptr);
  nodes_[id].bound = &p;
  param_nodes_[&p] = id;
  return id;
}

Graph::Id Graph::add(Id a, Id b) {
  check_same_shape(value(a), value(b), "add");
  Tensor out = Tensor::from(value(a).shape, value(a).data + value(b).data);
  bool ng = needs(a) || needs(b);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [a, b, id](Graph& g) {
      if (g.needs(a)) g.grad_mut(a).data += g.grad_of(id).data;
      if (g.needs(b)) g.grad_mut(b).data += g.grad_of(id).data;
    };
  }
  return id;
}

Graph::Id Graph::sub(Id a, Id b) {
  check_same_shape(value(a), value(b), "sub");
  Tensor out = Tensor::from(value(a).shape, value(a).data - value(b).data);
  bool ng = needs(a) || needs(b);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [a, b, id](Graph& g) {
      if (g.needs(a)) g.grad_mut(a).data += g.grad_of(id).data;
      if (g.needs(b)) g.grad_mut(b).data -= g.grad_of(id).data;
    };
  }
  return id;
}

Graph::Id Graph::mul(Id a, Id b) {
  check_same_shape(value(a), value(b), "mul");
  Tensor out = Tensor::from(value(a).shape,
                            (value(a).data.array() * value(b).data.array()).matrix());
  bool ng = needs(a) || needs(b);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [a, b, id](Graph& g) {
      if (g.needs(a)) {
        g.grad_mut(a).data.array() +=
            g.grad_of(id).data.array() * g.value(b).data.array();
      }
      if (g.needs(b)) {
        g.grad_mut(b).data.array() +=
            g.grad_of(id).data.array() * g.value(a).data.array();
      }
    };
  }
  return id;
}

Graph::Id Graph::scale(Id a, double s) {
  Tensor out = Tensor::from(value(a).shape, value(a).data * s);
  bool ng = needs(a);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [a, s, id](Graph& g) {
      g.grad_mut(a).data += g.grad_of(id).data * s;
    };
  }
  return id;
}

Graph::Id Graph::add_scalar(Id a, double s) {
  Tensor out = Tensor::from(value(a).shape, value(a).data.array() + s);
  bool ng = needs(a);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [a, id](Graph& g) {
      g.grad_mut(a).data += g.grad_of(id).data;
    };
  }
  return id;
}

Graph::Id Graph::relu(Id a) {
  Tensor out = Tensor::from(value(a).shape, value(a).data.cwiseMax(0.0));
  bool ng = needs(a);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [a, id](Graph& g) {
      const auto& x = g.value(a).data.array();
      g.grad_mut(a).data.array() +=
          g.grad_of(id).data.array() * (x > 0.0).cast<double>();
    };
  }
  return id;
}

Graph::Id Graph::sigmoid(Id a) {
  Tensor out = Tensor::from(
      value(a).shape, (1.0 / (1.0 + (-value(a).data.array()).exp())).matrix());
  bool ng = needs(a);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [a, id](Graph& g) {
      const auto& y = g.value(id).data.array();
      g.grad_mut(a).data.array() += g.grad_of(id).data.array() * y * (1.0 - y);
    };
  }
  return id;
}

Graph::Id Graph::tanh_(Id a) {
  Tensor out = Tensor::from(value(a).shape, value(a).data.array().tanh().matrix());
  bool ng = needs(a);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [a, id](Graph& g) {
      const auto& y = g.value(id).data.array();
      g.grad_mut(a).data.array() += g.grad_of(id).data.array() * (1.0 - y * y);
    };
  }
  return id;
}

Graph::Id Graph::exp_(Id a) {
  Tensor out = Tensor::from(value(a).shape, value(a).data.array().exp().matrix());
  bool ng = needs(a);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [a, id](Graph& g) {
      g.grad_mut(a).data.array() +=
          g.grad_of(id).data.array() * g.value(id).data.array();
    };
  }
  return id;
}

Graph::Id Graph::square(Id a) {
  Tensor out = Tensor::from(value(a).shape, value(a).data.array().square().matrix());
  bool ng = needs(a);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [a, id](Graph& g) {
      g.grad_mut(a).data.array() +=
          2.0 * g.grad_of(id).data.array() * g.value(a).data.array();
    };
  }
  return id;
}

Graph::Id Graph::minimum(Id a, Id b) {
  check_same_shape(value(a), value(b), "minimum");
  Tensor out = Tensor::from(value(a).shape, value(a).data.cwiseMin(value(b).data));
  bool ng = needs(a) || needs(b);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [a, b, id](Graph& g) {
      const auto& av = g.value(a).data.array();
      const auto& bv = g.value(b).data.array();
      const auto pick_a = (av <= bv).cast<double>();
      if (g.needs(a)) {
        g.grad_mut(a).data.array() += g.grad_of(id).data.array() * pick_a;
      }
      if (g.needs(b)) {
        g.grad_mut(b).data.array() += g.grad_of(id).data.array() * (1.0 - pick_a);
      }
    };
  }
  return id;
}

Graph::Id Graph::clamp(Id a, double lo, double hi) {
  Tensor out = Tensor::from(value(a).shape,
                            value(a).data.cwiseMax(lo).cwiseMin(hi));
  bool ng = needs(a);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [a, lo, hi, id](Graph& g) {
      const auto& x = g.value(a).data.array();
      g.grad_mut(a).data.array() +=
          g.grad_of(id).data.array() * ((x >= lo) && (x <= hi)).cast<double>();
    };
  }
  return id;
}

Graph::Id Graph::matmul(Id x, Id w) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  if (xv.rank() != 2 || wv.rank() != 2 || xv.dim(1) != wv.dim(0)) {
    throw std::invalid_argument("matmul: incompatible shapes");
  }
  Tensor out = Tensor::zeros({xv.dim(0), wv.dim(1)});
  out.mat().noalias() = xv.mat() * wv.mat();
  bool ng = needs(x) || needs(w);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [x, w, id](Graph& g) {
      const auto gout = g.grad_of(id).mat();
      if (g.needs(x)) g.grad_mut(x).mat().noalias() += gout * g.value(w).mat().transpose();
      if (g.needs(w)) g.grad_mut(w).mat().noalias() += g.value(x).mat().transpose() * gout;
    };
  }
  return id;
}

Graph::Id Graph::add_row(Id x, Id bias) {
  const Tensor& xv = value(x);
  const Tensor& bv = value(bias);
  if (xv.rank() != 2 || bv.rank() != 1 || xv.dim(1) != bv.dim(0)) {
    throw std::invalid_argument("add_row: incompatible shapes");
  }
  Tensor out = Tensor::zeros(xv.shape);
  out.mat() = xv.mat().rowwise() + bv.data.transpose();
  bool ng = needs(x) || needs(bias);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [x, bias, id](Graph& g) {
      if (g.needs(x)) g.grad_mut(x).data += g.grad_of(id).data;
      if (g.needs(bias)) {
        g.grad_mut(bias).data += g.grad_of(id).mat().colwise().sum().transpose();
      }
    };
  }
  return id;
}

Graph::Id Graph::broadcast_row(Id row, int rows) {
  const Tensor& rv = value(row);
  if (rv.rank() != 1) throw std::invalid_argument("broadcast_row: rank-1 expected");
  Tensor out = Tensor::zeros({rows, rv.dim(0)});
  out.mat() = rv.data.transpose().replicate(rows, 1);
  bool ng = needs(row);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [row, id](Graph& g) {
      g.grad_mut(row).data += g.grad_of(id).mat().colwise().sum().transpose();
    };
  }
  return id;
}

Graph::Id Graph::concat_cols(Id a, Id b) {
  const Tensor& av = value(a);
  const Tensor& bv = value(b);
  if (av.rank() != 2 || bv.rank() != 2 || av.dim(0) != bv.dim(0)) {
    throw std::invalid_argument("concat_cols: incompatible shapes");
  }
  const int B = av.dim(0), m = av.dim(1), n = bv.dim(1);
  Tensor out = Tensor::zeros({B, m + n});
  out.mat().leftCols(m) = av.mat();
  out.mat().rightCols(n) = bv.mat();
  bool ng = needs(a) || needs(b);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [a, b, m, n, id](Graph& g) {
      const auto gout = g.grad_of(id).mat();
      if (g.needs(a)) g.grad_mut(a).mat() += gout.leftCols(m);
      if (g.needs(b)) g.grad_mut(b).mat() += gout.rightCols(n);
    };
  }
  return id;
}

Graph::Id Graph::slice_cols(Id x, int start, int len) {
  const Tensor& xv = value(x);
  if (xv.rank() != 2 || start < 0 || start + len > xv.dim(1)) {
    throw std::invalid_argument("slice_cols: out of range");
  }
  Tensor out = Tensor::zeros({xv.dim(0), len});
  out.mat() = xv.mat().middleCols(start, len);
  bool ng = needs(x);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [x, start, len, id](Graph& g) {
      g.grad_mut(x).mat().middleCols(start, len) += g.grad_of(id).mat();
    };
  }
  return id;
}

Graph::Id Graph::conv1d(Id x, Id w, Id bias, int stride, int pad) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(bias);
  if (xv.rank() != 3 || wv.rank() != 3 || bv.rank() != 1) {
    throw std::invalid_argument("conv1d: bad ranks");
  }
  const int B = xv.dim(0), Ci = xv.dim(1), L = xv.dim(2);
  const int Co = wv.dim(0), K = wv.dim(2);
  if (wv.dim(1) != Ci || bv.dim(0) != Co) {
    throw std::invalid_argument("conv1d: channel mismatch");
  }
  const int Lout = (L + 2 * pad - K) / stride + 1;
  if (Lout < 1) throw std::invalid_argument("conv1d: empty output");

  Tensor out = Tensor::zeros({B, Co, Lout});
  for (int b = 0; b < B; ++b) {
    for (int co = 0; co < Co; ++co) {
      for (int j = 0; j < Lout; ++j) {
        double acc = bv.data[co];
        const int base = j * stride - pad;
        for (int ci = 0; ci < Ci; ++ci) {
          for (int u = 0; u < K; ++u) {
            const int l = base + u;
            if (l < 0 || l >= L) continue;
            acc += wv.data[idx3(co, ci, u, Ci, K)] * xv.data[idx3(b, ci, l, Ci, L)];
          }
        }
        out.data[idx3(b, co, j, Co, Lout)] = acc;
      }
    }
  }
  bool ng = needs(x) || needs(w) || needs(bias);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [x, w, bias, stride, pad, B, Ci, L, Co, K, Lout, id](Graph& g) {
      const Tensor& gout = g.grad_of(id);
      const Tensor& xv2 = g.value(x);
      const Tensor& wv2 = g.value(w);
      const bool nx = g.needs(x), nw = g.needs(w), nb = g.needs(bias);
      for (int b = 0; b < B; ++b) {
        for (int co = 0; co < Co; ++co) {
          for (int j = 0; j < Lout; ++j) {
            const double go = gout.data[idx3(b, co, j, Co, Lout)];
            if (go == 0.0) continue;
            if (nb) g.grad_mut(bias).data[co] += go;
            const int base = j * stride - pad;
            for (int ci = 0; ci < Ci; ++ci) {
              for (int u = 0; u < K; ++u) {
                const int l = base + u;
                if (l < 0 || l >= L) continue;
                if (nx) {
                  g.grad_mut(x).data[idx3(b, ci, l, Ci, L)] +=
                      go * wv2.data[idx3(co, ci, u, Ci, K)];
                }
                if (nw) {
                  g.grad_mut(w).data[idx3(co, ci, u, Ci, K)] +=
                      go * xv2.data[idx3(b, ci, l, Ci, L)];
                }
              }
            }
          }
        }
      }
    };
  }
  return id;
}

Graph::Id Graph::deconv1d(Id x, Id w, Id bias, int stride, int pad, int out_pad) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(bias);
  if (xv.rank() != 3 || wv.rank() != 3 || bv.rank() != 1) {
    throw std::invalid_argument("deconv1d: bad ranks");
  }
  const int B = xv.dim(0), Ci = xv.dim(1), L = xv.dim(2);
  const int Co = wv.dim(1), K = wv.dim(2);
  if (wv.dim(0) != Ci || bv.dim(0) != Co) {
    throw std::invalid_argument("deconv1d: channel mismatch");
  }
  const int Lout = (L - 1) * stride - 2 * pad + K + out_pad;
  if (Lout < 1) throw std::invalid_argument("deconv1d: empty output");

  Tensor out = Tensor::zeros({B, Co, Lout});
  for (int b = 0; b < B; ++b) {
    for (int co = 0; co < Co; ++co) {
      for (int m = 0; m < Lout; ++m) out.data[idx3(b, co, m, Co, Lout)] = bv.data[co];
    }
    for (int ci = 0; ci < Ci; ++ci) {
      for (int t = 0; t < L; ++t) {
        const double xval = xv.data[idx3(b, ci, t, Ci, L)];
        if (xval == 0.0) continue;
        const int base = t * stride - pad;
        for (int co = 0; co < Co; ++co) {
          for (int u = 0; u < K; ++u) {
            const int m = base + u;
            if (m < 0 || m >= Lout) continue;
            out.data[idx3(b, co, m, Co, Lout)] +=
                xval * wv.data[idx3(ci, co, u, Co, K)];
          }
        }
      }
    }
  }
  bool ng = needs(x) || needs(w) || needs(bias);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [x, w, bias, stride, pad, B, Ci, L, Co, K, Lout, id](Graph& g) {
      const Tensor& gout = g.grad_of(id);
      const Tensor& xv2 = g.value(x);
      const Tensor& wv2 = g.value(w);
      const bool nx = g.needs(x), nw = g.needs(w), nb = g.needs(bias);
      if (nb) {
        for (int b = 0; b < B; ++b) {
          for (int co = 0; co < Co; ++co) {
            for (int m = 0; m < Lout; ++m) {
              g.grad_mut(bias).data[co] += gout.data[idx3(b, co, m, Co, Lout)];
            }
          }
        }
      }
      for (int b = 0; b < B; ++b) {
        for (int ci = 0; ci < Ci; ++ci) {
          for (int t = 0; t < L; ++t) {
            const int base = t * stride - pad;
            double gx = 0.0;
            for (int co = 0; co < Co; ++co) {
              for (int u = 0; u < K; ++u) {
                const int m = base + u;
                if (m < 0 || m >= Lout) continue;
                const double go = gout.data[idx3(b, co, m, Co, Lout)];
                gx += go * wv2.data[idx3(ci, co, u, Co, K)];
                if (nw) {
                  g.grad_mut(w).data[idx3(ci, co, u, Co, K)] +=
                      go * xv2.data[idx3(b, ci, t, Ci, L)];
                }
              }
            }
            if (nx) g.grad_mut(x).data[idx3(b, ci, t, Ci, L)] += gx;
          }
        }
      }
    };
  }
  return id;
}

Graph::Id Graph::reshape(Id x, std::vector<int> shape) {
  if (Tensor::numel(shape) != value(x).size()) {
    throw std::invalid_argument("reshape: size mismatch");
  }
  Tensor out = Tensor::from(std::move(shape), value(x).data);
  bool ng = needs(x);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [x, id](Graph& g) {
      g.grad_mut(x).data += g.grad_of(id).data;
    };
  }
  return id;
}

Graph::Id Graph::sum(Id x) {
  Tensor out = Tensor::scalar(value(x).data.sum());
  bool ng = needs(x);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [x, id](Graph& g) {
      g.grad_mut(x).data.array() += g.grad_of(id).data[0];
    };
  }
  return id;
}

Graph::Id Graph::mean_weighted(Id x, Tensor weights) {
  check_same_shape(value(x), weights, "mean_weighted");
  const double wsum = weights.data.sum();
  if (wsum <= 0.0) throw std::invalid_argument("mean_weighted: nonpositive weight sum");
  Tensor out = Tensor::scalar(value(x).data.dot(weights.data) / wsum);
  bool ng = needs(x);
  Id id = emplace(std::move(out), ng, nullptr);
  if (ng) {
    nodes_[id].back = [x, w = std::move(weights), wsum, id](Graph& g) {
      g.grad_mut(x).data += (g.grad_of(id).data[0] / wsum) * w.data;
    };
  }
  return id;
}

void Graph::backward(Id root) {
  if (value(root).size() != 1) {
    throw std::invalid_argument("backward: root must be a scalar");
  }
  if (!needs(root)) return;  // nothing upstream depends on gradients
  grad_mut(root).data[0] = 1.0;
  for (Id id = root; id >= 0; --id) {
    Node& node = nodes_[id];
    if (!node.needs_grad) continue;
    if (node.back) node.back(*this);
    if (node.bound != nullptr) node.bound->grad.data += node.grad.data;
  }
}

}  // namespace plnav::nn
