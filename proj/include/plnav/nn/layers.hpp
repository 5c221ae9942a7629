#pragma once

#include <memory>
#include <string>
#include <vector>

#include "plnav/nn/graph.hpp"
#include "plnav/rng.hpp"

namespace plnav::nn {

/// Owns every learnable tensor of a model; layers keep raw pointers into it.
class ParamStore {
 public:
  Param& create(const std::string& name, std::vector<int> shape);
  Param& find(const std::string& name);
  const Param& find(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::vector<Param*> all();
  std::vector<const Param*> all() const;

  int64_t total_size() const;
  void zero_grads();
  bool grads_finite() const;

 private:
  std::vector<std::unique_ptr<Param>> params_;
};

/// Uniform(-a, a) fan-in scaled init.
void xavier_init(Tensor& t, int fan_in, int fan_out, Rng& rng);

struct DenseLayer {
  Param* weight = nullptr;  // [in, out]
  Param* bias = nullptr;    // [out]

  static DenseLayer create(ParamStore& store, const std::string& name, int in, int out,
                           Rng& rng);
  Graph::Id forward(Graph& g, Graph::Id x) const;
};

struct Conv1dLayer {
  Param* weight = nullptr;  // [out_ch, in_ch, k]
  Param* bias = nullptr;    // [out_ch]
  int stride = 1;
  int pad = 0;

  static Conv1dLayer create(ParamStore& store, const std::string& name, int in_ch,
                            int out_ch, int k, int stride, int pad, Rng& rng);
  Graph::Id forward(Graph& g, Graph::Id x) const;
};

struct Deconv1dLayer {
  Param* weight = nullptr;  // [in_ch, out_ch, k]
  Param* bias = nullptr;    // [out_ch]
  int stride = 1;
  int pad = 0;
  int out_pad = 0;

  static Deconv1dLayer create(ParamStore& store, const std::string& name, int in_ch,
                              int out_ch, int k, int stride, int pad, int out_pad,
                              Rng& rng);
  Graph::Id forward(Graph& g, Graph::Id x) const;
};

/// Single LSTM cell composed from tape primitives; the forget-gate bias is
/// initialized to 1.
struct LstmCell {
  Param* weight = nullptr;  // [in + hidden, 4*hidden], gate order i,f,o,g
  Param* bias = nullptr;    // [4*hidden]
  int hidden = 0;

  static LstmCell create(ParamStore& store, const std::string& name, int in, int hidden,
                         Rng& rng);
  /// x: [B, in], h/c: [B, hidden]; returns (h', c').
  std::pair<Graph::Id, Graph::Id> forward(Graph& g, Graph::Id x, Graph::Id h,
                                          Graph::Id c) const;
};

}  // namespace plnav::nn
