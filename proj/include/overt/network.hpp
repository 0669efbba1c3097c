#pragma once

#include <string>
#include <vector>

#include "overt/interval.hpp"

namespace overt {

enum class Activation { Relu, Linear, Tanh };

struct Layer {
  std::vector<std::vector<double>> weights;  // out x in, row-major
  std::vector<double> bias;
  Activation activation = Activation::Relu;

  size_t out_dim() const { return weights.size(); }
  size_t in_dim() const { return weights.empty() ? 0 : weights[0].size(); }
};

// Feed-forward controller. The final layer is linear (control output);
// hidden activations are relu, or tanh behind the smooth-activation flag.
struct Network {
  std::vector<Layer> layers;

  size_t input_dim() const { return layers.front().in_dim(); }
  size_t output_dim() const { return layers.back().out_dim(); }
  void validate() const;

  static Network zeros(size_t in, size_t out);  // constant-0 controller
};

struct NeuronBounds {
  // Pre-activation interval per layer per neuron.
  std::vector<std::vector<Interval>> pre;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Network load_network(const std::string& path);
Network network_from_json_text(const std::string& text);
std::string network_to_json_text(const Network& net);

std::vector<double> forward(const Network& net, const std::vector<double>& x);

// Sound pre-activation intervals from an interval forward pass over `box`.
NeuronBounds neuron_bounds(const Network& net, const std::vector<Interval>& box);

enum class RangeMethod { IntervalArithmetic, Mip };

// Sound output box. The interval method is the cheap default; the mip
// method returns the certified min/max envelope per output and requires
// relu/linear activations.
std::vector<Interval> output_range(const Network& net, const std::vector<Interval>& box,
                                   RangeMethod method = RangeMethod::IntervalArithmetic);

}  // namespace overt
