#include "ranslice/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ranslice {

namespace {
inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace

Mlp Mlp::make(const std::vector<int>& dims, Head head, std::mt19937_64& rng, double out_lo,
              double out_hi) {
  if (dims.size() < 2) throw std::invalid_argument("Mlp: need at least input and output dims");
  for (int d : dims) {
    if (d < 1) throw std::invalid_argument("Mlp: layer dims must be positive");
  }
  Mlp net;
  net.dims = dims;
  net.head = head;
  net.out_lo = out_lo;
  net.out_hi = out_hi;
  const int n_layers = static_cast<int>(dims.size()) - 1;
  for (int l = 0; l < n_layers; ++l) {
    const int fan_in = dims[l];
    const double limit = 1.0 / std::sqrt(static_cast<double>(fan_in));
    const double scale = (l == n_layers - 1) ? 0.01 : 1.0;
    std::uniform_real_distribution<double> dist(-limit, limit);
    Mat w(dims[l + 1], dims[l]);
    for (double& x : w.a) x = scale * dist(rng);
    std::vector<double> b(dims[l + 1]);
    for (double& x : b) x = scale * dist(rng);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

std::vector<double> mlp_forward(const Mlp& net, const std::vector<double>& input,
                                ForwardCache* cache) {
  if (static_cast<int>(input.size()) != net.input_dim()) {
    throw std::invalid_argument("mlp_forward: input dim mismatch");
  }
  const int n_layers = net.n_layers();
  if (cache) {
    cache->acts.resize(n_layers + 1);
    cache->pre.resize(n_layers);
    cache->acts[0] = input;
  }
  std::vector<double> cur = input;
  std::vector<double> next;
  for (int l = 0; l < n_layers; ++l) {
    const Mat& w = net.weights[l];
    next.assign(w.rows, 0.0);
    for (int r = 0; r < w.rows; ++r) {
      double z = net.biases[l][r];
      const double* row = &w.a[static_cast<size_t>(r) * w.cols];
      for (int c = 0; c < w.cols; ++c) z += row[c] * cur[c];
      next[r] = z;
    }
    if (cache) cache->pre[l] = next;
    if (l < n_layers - 1) {
      for (double& z : next) z = z > 0.0 ? z : 0.0;  // ReLU
    } else if (net.head == Mlp::Head::BoundedAction) {
      for (double& z : next) z = net.out_lo + (net.out_hi - net.out_lo) * sigmoid(z);
    }
    if (cache) cache->acts[l + 1] = next;
    cur.swap(next);
  }
  return cur;
}

void Gradients::init_like(const Mlp& net) {
  d_weights.clear();
  d_biases.clear();
  for (int l = 0; l < net.n_layers(); ++l) {
    d_weights.emplace_back(net.weights[l].rows, net.weights[l].cols);
    d_biases.emplace_back(net.biases[l].size(), 0.0);
  }
  d_input.assign(net.input_dim(), 0.0);
}

void Gradients::zero() {
  for (auto& m : d_weights) std::fill(m.a.begin(), m.a.end(), 0.0);
  for (auto& b : d_biases) std::fill(b.begin(), b.end(), 0.0);
  std::fill(d_input.begin(), d_input.end(), 0.0);
}

void Gradients::scale(double s) {
  for (auto& m : d_weights)
    for (double& x : m.a) x *= s;
  for (auto& b : d_biases)
    for (double& x : b) x *= s;
  for (double& x : d_input) x *= s;
}

void mlp_backward(const Mlp& net, const ForwardCache& cache, const std::vector<double>& out_grad,
                  Gradients& grads) {
  const int n_layers = net.n_layers();
  if (static_cast<int>(cache.pre.size()) != n_layers) {
    throw std::invalid_argument("mlp_backward: cache does not match network");
  }
  if (static_cast<int>(out_grad.size()) != net.output_dim()) {
    throw std::invalid_argument("mlp_backward: out_grad dim mismatch");
  }
  if (grads.d_weights.empty()) grads.init_like(net);

  // delta of the output layer through the head
  std::vector<double> delta = out_grad;
  if (net.head == Mlp::Head::BoundedAction) {
    const double span = net.out_hi - net.out_lo;
    for (size_t i = 0; i < delta.size(); ++i) {
      const double s = (cache.acts[n_layers][i] - net.out_lo) / span;
      delta[i] *= span * s * (1.0 - s);
    }
  }

  std::vector<double> prev_delta;
  for (int l = n_layers - 1; l >= 0; --l) {
    const Mat& w = net.weights[l];
    const auto& act_in = cache.acts[l];
    Mat& dw = grads.d_weights[l];
    auto& db = grads.d_biases[l];
    for (int r = 0; r < w.rows; ++r) {
      const double d = delta[r];
      db[r] += d;
      double* dw_row = &dw.a[static_cast<size_t>(r) * w.cols];
      for (int c = 0; c < w.cols; ++c) dw_row[c] += d * act_in[c];
    }
    // propagate to the previous layer
    prev_delta.assign(w.cols, 0.0);
    for (int r = 0; r < w.rows; ++r) {
      const double d = delta[r];
      const double* row = &w.a[static_cast<size_t>(r) * w.cols];
      for (int c = 0; c < w.cols; ++c) prev_delta[c] += row[c] * d;
    }
    if (l > 0) {
      const auto& pre_prev = cache.pre[l - 1];
      for (int c = 0; c < w.cols; ++c) {
        if (pre_prev[c] <= 0.0) prev_delta[c] = 0.0;  // ReLU'
      }
    }
    delta.swap(prev_delta);
  }
  grads.d_input = delta;
}

void Adam::init_like(const Mlp& net) {
  t = 0;
  m_w.clear();
  v_w.clear();
  m_b.clear();
  v_b.clear();
  for (int l = 0; l < net.n_layers(); ++l) {
    m_w.emplace_back(net.weights[l].rows, net.weights[l].cols);
    v_w.emplace_back(net.weights[l].rows, net.weights[l].cols);
    m_b.emplace_back(net.biases[l].size(), 0.0);
    v_b.emplace_back(net.biases[l].size(), 0.0);
  }
}

void Adam::step(Mlp& net, const Gradients& grads) {
  if (m_w.empty()) init_like(net);
  ++t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  auto update = [&](double& p, double g, double& m, double& v) {
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g * g;
    p -= lr * (m / bc1) / (std::sqrt(v / bc2) + eps);
  };
  for (int l = 0; l < net.n_layers(); ++l) {
    auto& w = net.weights[l].a;
    for (size_t i = 0; i < w.size(); ++i) {
      update(w[i], grads.d_weights[l].a[i], m_w[l].a[i], v_w[l].a[i]);
    }
    auto& b = net.biases[l];
    for (size_t i = 0; i < b.size(); ++i) {
      update(b[i], grads.d_biases[l][i], m_b[l][i], v_b[l][i]);
    }
  }
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (target.dims != online.dims || target.head != online.head) {
    throw std::invalid_argument("soft_update: architecture mismatch");
  }
  for (int l = 0; l < target.n_layers(); ++l) {
    auto& tw = target.weights[l].a;
    const auto& ow = online.weights[l].a;
    for (size_t i = 0; i < tw.size(); ++i) tw[i] = tau * ow[i] + (1.0 - tau) * tw[i];
    auto& tb = target.biases[l];
    const auto& ob = online.biases[l];
    for (size_t i = 0; i < tb.size(); ++i) tb[i] = tau * ob[i] + (1.0 - tau) * tb[i];
  }
}

void save_mlp(const Mlp& net, std::ostream& out) {
  out << "mlp";
  for (int d : net.dims) out << ' ' << d;
  char buf[64];
  if (net.head == Mlp::Head::BoundedAction) {
    std::snprintf(buf, sizeof(buf), " bounded %.17g %.17g", net.out_lo, net.out_hi);
    out << buf;
  } else {
    out << " linear";
  }
  out << '\n';
  auto emit = [&](const std::vector<double>& v) {
    for (size_t i = 0; i < v.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
      out << (i ? " " : "") << buf;
    }
    out << '\n';
  };
  for (int l = 0; l < net.n_layers(); ++l) {
    emit(net.weights[l].a);
    emit(net.biases[l]);
  }
}

Mlp load_mlp(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_mlp: empty stream");
  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != "mlp") throw std::runtime_error("load_mlp: bad header");
  std::vector<int> dims;
  std::vector<std::string> tokens;
  std::string tok;
  while (header >> tok) tokens.push_back(tok);
  size_t i = 0;
  while (i < tokens.size()) {
    try {
      size_t pos = 0;
      int d = std::stoi(tokens[i], &pos);
      if (pos != tokens[i].size()) break;
      dims.push_back(d);
      ++i;
    } catch (...) {
      break;
    }
  }
  if (dims.size() < 2 || i >= tokens.size()) throw std::runtime_error("load_mlp: bad dims header");

  Mlp net;
  net.dims = dims;
  if (tokens[i] == "linear") {
    net.head = Mlp::Head::Linear;
  } else if (tokens[i] == "bounded") {
    if (i + 2 >= tokens.size()) throw std::runtime_error("load_mlp: bounded head needs lo hi");
    net.head = Mlp::Head::BoundedAction;
    net.out_lo = std::stod(tokens[i + 1]);
    net.out_hi = std::stod(tokens[i + 2]);
  } else {
    throw std::runtime_error("load_mlp: unknown head '" + tokens[i] + "'");
  }

  auto read_line_of = [&](size_t count, std::vector<double>& out_v) {
    if (!std::getline(in, line)) throw std::runtime_error("load_mlp: truncated file");
    std::istringstream ss(line);
    out_v.resize(count);
    for (size_t k = 0; k < count; ++k) {
      if (!(ss >> out_v[k])) throw std::runtime_error("load_mlp: short parameter line");
    }
    double extra;
    if (ss >> extra) throw std::runtime_error("load_mlp: oversized parameter line");
  };
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    Mat w(dims[l + 1], dims[l]);
    read_line_of(w.a.size(), w.a);
    std::vector<double> b;
    read_line_of(static_cast<size_t>(dims[l + 1]), b);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::move(b));
  }
  return net;
}

void save_mlp_file(const Mlp& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mlp_file: cannot write '" + path + "'");
  save_mlp(net, out);
  if (!out) throw std::runtime_error("save_mlp_file: write failed for '" + path + "'");
}

Mlp load_mlp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mlp_file: cannot open '" + path + "'");
  return load_mlp(in);
}

}  // namespace ranslice
