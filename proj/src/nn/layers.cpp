#include "plnav/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace plnav::nn {

Param& ParamStore::create(const std::string& name, std::vector<int> shape) {
  if (contains(name)) throw std::invalid_argument("duplicate param: " + name);
  params_.push_back(std::make_unique<Param>(name, Tensor::zeros(std::move(shape))));
  return *params_.back();
}

Param& ParamStore::find(const std::string& name) {
  for (auto& p : params_) {
    if (p->name == name) return *p;
  }
  throw std::out_of_range("param not found: " + name);
}

const Param& ParamStore::find(const std::string& name) const {
  for (const auto& p : params_) {
    if (p->name == name) return *p;
  }
  throw std::out_of_range("param not found: " + name);
}

bool ParamStore::contains(const std::string& name) const {
  for (const auto& p : params_) {
    if (p->name == name) return true;
  }
  return false;
}

std::vector<Param*> ParamStore::all() {
  std::vector<Param*> out;
  out.reserve(params_.size());
  for (auto& p : params_) out.push_back(p.get());
  return out;
}

std::vector<const Param*> ParamStore::all() const {
  std::vector<const Param*> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.get());
  return out;
}

int64_t ParamStore::total_size() const {
  int64_t n = 0;
  for (const auto& p : params_) n += p->value.size();
  return n;
}

void ParamStore::zero_grads() {
  for (auto& p : params_) p->grad.data.setZero();
}

bool ParamStore::grads_finite() const {
  for (const auto& p : params_) {
    if (!p->grad.all_finite()) return false;
  }
  return true;
}

void xavier_init(Tensor& t, int fan_in, int fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data[i] = rng.uniform(-a, a);
}

DenseLayer DenseLayer::create(ParamStore& store, const std::string& name, int in,
                              int out, Rng& rng) {
  DenseLayer layer;
  layer.weight = &store.create(name + ".weight", {in, out});
  layer.bias = &store.create(name + ".bias", {out});
  xavier_init(layer.weight->value, in, out, rng);
  return layer;
}

Graph::Id DenseLayer::forward(Graph& g, Graph::Id x) const {
  return g.add_row(g.matmul(x, g.param(*weight)), g.param(*bias));
}

Conv1dLayer Conv1dLayer::create(ParamStore& store, const std::string& name, int in_ch,
                                int out_ch, int k, int stride, int pad, Rng& rng) {
  Conv1dLayer layer;
  layer.weight = &store.create(name + ".weight", {out_ch, in_ch, k});
  layer.bias = &store.create(name + ".bias", {out_ch});
  layer.stride = stride;
  layer.pad = pad;
  xavier_init(layer.weight->value, in_ch * k, out_ch * k, rng);
  return layer;
}

Graph::Id Conv1dLayer::forward(Graph& g, Graph::Id x) const {
  return g.conv1d(x, g.param(*weight), g.param(*bias), stride, pad);
}

Deconv1dLayer Deconv1dLayer::create(ParamStore& store, const std::string& name,
                                    int in_ch, int out_ch, int k, int stride, int pad,
                                    int out_pad, Rng& rng) {
  Deconv1dLayer layer;
  layer.weight = &store.create(name + ".weight", {in_ch, out_ch, k});
  layer.bias = &store.create(name + ".bias", {out_ch});
  layer.stride = stride;
  layer.pad = pad;
  layer.out_pad = out_pad;
  xavier_init(layer.weight->value, in_ch * k, out_ch * k, rng);
  return layer;
}

Graph::Id Deconv1dLayer::forward(Graph& g, Graph::Id x) const {
  return g.deconv1d(x, g.param(*weight), g.param(*bias), stride, pad, out_pad);
}

LstmCell LstmCell::create(ParamStore& store, const std::string& name, int in, int hidden,
                          Rng& rng) {
  LstmCell cell;
  cell.weight = &store.create(name + ".weight", {in + hidden, 4 * hidden});
  cell.bias = &store.create(name + ".bias", {4 * hidden});
  cell.hidden = hidden;
  xavier_init(cell.weight->value, in + hidden, hidden, rng);
  for (int i = hidden; i < 2 * hidden; ++i) cell.bias->value.data[i] = 1.0;
  return cell;
}

std::pair<Graph::Id, Graph::Id> LstmCell::forward(Graph& g, Graph::Id x, Graph::Id h,
                                                  Graph::Id c) const {
  Graph::Id z = g.concat_cols(x, h);
  Graph::Id gates = g.add_row(g.matmul(z, g.param(*weight)), g.param(*bias));
  Graph::Id i = g.sigmoid(g.slice_cols(gates, 0, hidden));
  Graph::Id f = g.sigmoid(g.slice_cols(gates, hidden, hidden));
  Graph::Id o = g.sigmoid(g.slice_cols(gates, 2 * hidden, hidden));
  Graph::Id u = g.tanh_(g.slice_cols(gates, 3 * hidden, hidden));
  Graph::Id c_next = g.add(g.mul(f, c), g.mul(i, u));
  Graph::Id h_next = g.mul(o, g.tanh_(c_next));
  return {h_next, c_next};
}

}  // namespace plnav::nn
