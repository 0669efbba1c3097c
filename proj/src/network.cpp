#include "overt/network.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace overt {

void Network::validate() const {
  if (layers.empty()) throw SchemaError("network: needs at least one layer");
  for (size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    if (layer.weights.empty()) throw SchemaError("network: empty weight matrix");
    size_t in = layer.weights[0].size();
    if (in == 0) throw SchemaError("network: zero-width weight row");
    for (const auto& row : layer.weights)
      if (row.size() != in) throw SchemaError("network: ragged weight matrix");
    if (layer.bias.size() != layer.weights.size())
      throw SchemaError("network: bias length does not match rows");
    if (l > 0 && in != layers[l - 1].out_dim())
      throw SchemaError("network: layer " + std::to_string(l) + " expects input " +
                        std::to_string(in) + " but previous layer emits " +
                        std::to_string(layers[l - 1].out_dim()));
    for (const auto& row : layer.weights)
      for (double w : row)
        if (!std::isfinite(w)) throw SchemaError("network: non-finite weight");
    for (double b : layer.bias)
      if (!std::isfinite(b)) throw SchemaError("network: non-finite bias");
  }
  if (layers.back().activation != Activation::Linear)
    throw SchemaError("network: final layer must be linear");
}

Network Network::zeros(size_t in, size_t out) {
  Network net;
  Layer l;
  l.weights.assign(out, std::vector<double>(in, 0.0));
  l.bias.assign(out, 0.0);
  l.activation = Activation::Linear;
  net.layers.push_back(std::move(l));
  return net;
}

namespace {

Activation activation_from_string(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "linear") return Activation::Linear;
  if (s == "tanh") return Activation::Tanh;
  throw SchemaError("network: unknown activation '" + s + "'");
}

const char* activation_to_string(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Linear: return "linear";
    case Activation::Tanh: return "tanh";
  }
  return "?";
}

}  // namespace

Network network_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("network: invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("layers") || !j["layers"].is_array() ||
      j["layers"].empty())
    throw SchemaError("network: expected {\"layers\": [...]}");
  Network net;
  for (const auto& jl : j["layers"]) {
    if (!jl.contains("weights") || !jl.contains("bias") || !jl.contains("activation"))
      throw SchemaError("network: layer needs weights, bias, activation");
    Layer layer;
    for (const auto& row : jl["weights"]) layer.weights.push_back(row.get<std::vector<double>>());
    layer.bias = jl["bias"].get<std::vector<double>>();
    layer.activation = activation_from_string(jl["activation"].get<std::string>());
    net.layers.push_back(std::move(layer));
  }
  net.validate();
  return net;
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("network: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return network_from_json_text(ss.str());
}

std::string network_to_json_text(const Network& net) {
  nlohmann::ordered_json j;
  j["layers"] = nlohmann::ordered_json::array();
  for (const auto& l : net.layers) {
    nlohmann::ordered_json jl;
    jl["weights"] = l.weights;
    jl["bias"] = l.bias;
    jl["activation"] = activation_to_string(l.activation);
    j["layers"].push_back(std::move(jl));
  }
  return j.dump(2);
}

std::vector<double> forward(const Network& net, const std::vector<double>& x) {
  if (x.size() != net.input_dim())
    throw std::invalid_argument("forward: input dimension mismatch");
  std::vector<double> cur = x;
  for (const auto& layer : net.layers) {
    std::vector<double> next(layer.out_dim());
    for (size_t i = 0; i < layer.out_dim(); ++i) {
      double z = layer.bias[i];
      for (size_t k = 0; k < layer.in_dim(); ++k) z += layer.weights[i][k] * cur[k];
      switch (layer.activation) {
        case Activation::Relu: next[i] = z > 0.0 ? z : 0.0; break;
        case Activation::Linear: next[i] = z; break;
        case Activation::Tanh: next[i] = std::tanh(z); break;
      }
    }
    cur = std::move(next);
  }
  return cur;
}

NeuronBounds neuron_bounds(const Network& net, const std::vector<Interval>& box) {
  if (box.size() != net.input_dim())
    throw std::invalid_argument("neuron_bounds: box dimension mismatch");
  NeuronBounds nb;
  std::vector<Interval> cur = box;
  for (const auto& layer : net.layers) {
    std::vector<Interval> pre(layer.out_dim());
    for (size_t i = 0; i < layer.out_dim(); ++i) {
      double lo = layer.bias[i], hi = layer.bias[i];
      for (size_t k = 0; k < layer.in_dim(); ++k) {
        double w = layer.weights[i][k];
        if (w >= 0) {
          lo += w * cur[k].lo;
          hi += w * cur[k].hi;
        } else {
          lo += w * cur[k].hi;
          hi += w * cur[k].lo;
        }
      }
      pre[i] = Interval(lo, hi);
    }
    nb.pre.push_back(pre);
    std::vector<Interval> post(layer.out_dim());
    for (size_t i = 0; i < layer.out_dim(); ++i) {
      switch (layer.activation) {
        case Activation::Relu:
          post[i] = Interval(std::max(0.0, pre[i].lo), std::max(0.0, pre[i].hi));
          break;
        case Activation::Linear: post[i] = pre[i]; break;
        case Activation::Tanh:
          post[i] = Interval(std::tanh(pre[i].lo), std::tanh(pre[i].hi));
          break;
      }
    }
    cur = std::move(post);
  }
  return nb;
}

std::vector<Interval> output_range(const Network& net, const std::vector<Interval>& box,
                                   RangeMethod method) {
  if (method == RangeMethod::IntervalArithmetic) {
    NeuronBounds nb = neuron_bounds(net, box);
    const auto& last = nb.pre.back();
    std::vector<Interval> out(last.begin(), last.end());
    if (net.layers.back().activation == Activation::Tanh)
      for (auto& o : out) o = Interval(std::tanh(o.lo), std::tanh(o.hi));
    return out;
  }
  // The MIP-backed exact envelope lives with the encoder to keep this
  // translation unit solver-free.
  extern std::vector<Interval> output_range_mip(const Network&, const std::vector<Interval>&);
  return output_range_mip(net, box);
}

}  // namespace overt
