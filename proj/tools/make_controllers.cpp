// Regenerates the controllers and system files shipped under data/. All
// randomness is fixed-seed so the outputs are reproducible byte for byte.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "overt/benchmarks.hpp"
#include "overt/network.hpp"

using namespace overt;

namespace {

// Exact PD law u = -k1*x1 - k2*x2 realized as a 2x8x8x1 relu network using
// the relu(v) - relu(-v) identity twice; the spare neurons carry zero
// weight.
Network pendulum_pd(double k1, double k2) {
  Network net;
  Layer l1;
  l1.weights.assign(8, std::vector<double>(2, 0.0));
  l1.bias.assign(8, 0.0);
  l1.weights[0][0] = 1.0;   // relu(x1)
  l1.weights[1][0] = -1.0;  // relu(-x1)
  l1.weights[2][1] = 1.0;   // relu(x2)
  l1.weights[3][1] = -1.0;  // relu(-x2)
  l1.activation = Activation::Relu;

  Layer l2;
  l2.weights.assign(8, std::vector<double>(8, 0.0));
  l2.bias.assign(8, 0.0);
  // L = -k1*(relu(x1) - relu(-x1)) - k2*(relu(x2) - relu(-x2))
  l2.weights[0] = {-k1, k1, -k2, k2, 0, 0, 0, 0};
  l2.weights[1] = {k1, -k1, k2, -k2, 0, 0, 0, 0};  // -L
  l2.activation = Activation::Relu;

  Layer l3;
  l3.weights.assign(1, std::vector<double>(8, 0.0));
  l3.bias.assign(1, 0.0);
  l3.weights[0][0] = 1.0;
  l3.weights[0][1] = -1.0;
  l3.activation = Activation::Linear;

  net.layers = {l1, l2, l3};
  net.validate();
  return net;
}

Network random_net(uint64_t seed, std::vector<size_t> dims, Activation hidden,
                   double weight_scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> w(0.0, weight_scale);
  Network net;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.weights.assign(dims[l + 1], std::vector<double>(dims[l]));
    layer.bias.assign(dims[l + 1], 0.0);
    for (auto& row : layer.weights)
      for (double& x : row) x = w(rng);
    for (double& b : layer.bias) b = 0.2 * w(rng);
    layer.activation = l + 2 == dims.size() ? Activation::Linear : hidden;
    net.layers.push_back(std::move(layer));
  }
  net.validate();
  return net;
}

// Rescales the output layer so the interval output range over `box` fits
// inside [-limit, limit].
void clamp_outputs(Network& net, const std::vector<Interval>& box, double limit) {
  auto range = output_range(net, box, RangeMethod::IntervalArithmetic);
  double worst = 0.0;
  for (const auto& r : range) worst = std::max({worst, std::fabs(r.lo), std::fabs(r.hi)});
  if (worst <= limit || worst == 0.0) return;
  double s = limit / worst;
  Layer& last = net.layers.back();
  for (auto& row : last.weights)
    for (double& v : row) v *= s;
  for (double& b : last.bias) b *= s;
}

void write(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
  std::cout << "wrote " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::string root = argc > 1 ? argv[1] : "data";
  std::filesystem::create_directories(root + "/controllers");
  std::filesystem::create_directories(root + "/systems");

  write(root + "/controllers/pendulum_pd_8x8.json",
        network_to_json_text(pendulum_pd(2.0, 1.0)));
  write(root + "/controllers/pendulum_small_2x4x1.json",
        network_to_json_text(random_net(101, {2, 4, 1}, Activation::Relu, 0.5)));
  write(root + "/controllers/pendulum_tanh_2x8x1.json",
        network_to_json_text(random_net(202, {2, 8, 1}, Activation::Tanh, 0.7)));
  write(root + "/controllers/pendulum_tanh_2x3x1.json",
        network_to_json_text(random_net(606, {2, 3, 1}, Activation::Tanh, 0.8)));
  write(root + "/controllers/pendulum_zero.json", network_to_json_text(Network::zeros(2, 1)));

  {
    Network tora = random_net(303, {4, 8, 8, 1}, Activation::Relu, 0.4);
    BenchmarkInstance inst = get_system("tora");
    clamp_outputs(tora, inst.initial.dims, 2.0);
    write(root + "/controllers/tora_4x8x8x1.json", network_to_json_text(tora));
  }
  {
    Network car = random_net(404, {4, 8, 8, 2}, Activation::Relu, 0.25);
    BenchmarkInstance inst = get_system("car");
    clamp_outputs(car, inst.initial.dims, 2.0);
    write(root + "/controllers/car_4x8x8x2.json", network_to_json_text(car));
  }
  {
    Network acc = random_net(505, {6, 8, 1}, Activation::Relu, 0.15);
    BenchmarkInstance inst = get_system("acc");
    clamp_outputs(acc, inst.initial.dims, 2.0);
    write(root + "/controllers/acc_6x8x1.json", network_to_json_text(acc));
  }

  for (const auto& name : benchmark_names()) {
    BenchmarkInstance inst = get_system(name);
    write(root + "/systems/" + name + ".json", system_to_json_text(inst.system));
  }

  // Ready-to-run query configs over the shipped files, desk-sized.
  std::filesystem::create_directories(root + "/queries");
  auto query = [&](const std::string& name, const std::string& controller, int horizon,
                   const std::vector<int>& schedule) {
    std::ostringstream os;
    os << "{\n  \"benchmark\": \"" << name << "\",\n  \"controller\": \"../controllers/" << controller << "\",\n  \"horizon\": " << horizon
       << ",\n  \"schedule\": [";
    for (size_t i = 0; i < schedule.size(); ++i) os << (i ? ", " : "") << schedule[i];
    os << "],\n  \"seed\": 1\n}\n";
    write(root + "/queries/" + name + "_reach.json", os.str());
  };
  query("pendulum", "pendulum_pd_8x8.json", 10, {5, 5});
  query("tora", "tora_4x8x8x1.json", 4, {2, 2});
  query("car", "car_4x8x8x2.json", 4, {2, 2});
  query("acc", "acc_6x8x1.json", 3, {1, 1, 1});
  return 0;
}
