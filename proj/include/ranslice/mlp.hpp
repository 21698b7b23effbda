#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace ranslice {

struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> a;  // row-major

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

// Dense feed-forward network with ReLU hidden layers. The output head
// is either a plain linear layer (critic) or an affine sigmoid squash
// onto [lo, hi] (actor), so actor outputs respect the action bounds for
// any weights and gradients stay alive near the bounds.
struct Mlp {
  enum class Head { Linear, BoundedAction };

  std::vector<int> dims;  // layer widths, input first
  Head head = Head::Linear;
  double out_lo = 0.0, out_hi = 1.0;
  std::vector<Mat> weights;             // weights[l]: dims[l+1] x dims[l]
  std::vector<std::vector<double>> biases;

  int n_layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }

  // Uniform fan-in init; the final layer starts 100x smaller.
  static Mlp make(const std::vector<int>& dims, Head head, std::mt19937_64& rng,
                  double out_lo = 0.0, double out_hi = 1.0);
};

struct ForwardCache {
  std::vector<std::vector<double>> acts;  // acts[0] = input, acts[l] = post-activation
  std::vector<std::vector<double>> pre;   // pre[l] = pre-activation of layer l
};

// Forward pass; fills the cache for a later backward pass when given.
std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& input,
                                ForwardCache* cache = nullptr);

struct Gradients {
  std::vector<Mat> d_weights;
  std::vector<std::vector<double>> d_biases;
  std::vector<double> d_input;

  void init_like(const Mlp& net);
  void zero();
  void scale(double s);
};

// Exact gradients of the forward map. out_grad is dLoss/d(output);
// parameter gradients are accumulated into grads (d_input is replaced).
void mlp_backward(const Mlp& net, const ForwardCache& cache, const std::vector<double>& out_grad,
                  Gradients& grads);

struct Adam {
  double lr = 1e-3;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  int64_t t = 0;
  std::vector<Mat> m_w, v_w;
  std::vector<std::vector<double>> m_b, v_b;

  explicit Adam(double lr_ = 1e-3) : lr(lr_) {}
  void init_like(const Mlp& net);
  void step(Mlp& net, const Gradients& grads);
};

// target <- tau * online + (1 - tau) * target, per parameter.
void soft_update(Mlp& target, const Mlp& online, double tau);

// Text checkpoint: a header line with the layer dims and head, then one
// line per parameter matrix in row-major decimal at full precision.
void save_mlp(const Mlp& net, std::ostream& out);
Mlp load_mlp(std::istream& in);
void save_mlp_file(const Mlp& net, const std::string& path);
Mlp load_mlp_file(const std::string& path);

}  // namespace ranslice
