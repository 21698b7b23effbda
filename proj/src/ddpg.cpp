#include "ranslice/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ranslice/broker.hpp"

namespace ranslice {

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  storage_.reserve(capacity);
}

void ReplayBuffer::push(Transition t) {
  if (size_ < capacity_) {
    storage_.push_back(std::move(t));
    ++size_;
  } else {
    storage_[head_] = std::move(t);
  }
  head_ = (head_ + 1) % capacity_;
}

std::vector<int> ReplayBuffer::sample_indices(int batch, std::mt19937_64& rng) const {
  if (batch > size_) throw std::invalid_argument("ReplayBuffer: batch larger than buffer");
  // Floyd's sampling: batch distinct indices, O(batch) draws
  std::vector<int> picked;
  picked.reserve(batch);
  for (int j = size_ - batch; j < size_; ++j) {
    std::uniform_int_distribution<int> dist(0, j);
    const int t = dist(rng);
    if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
      picked.push_back(t);
    } else {
      picked.push_back(j);
    }
  }
  return picked;
}

void DdpgConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("DdpgConfig: gamma must be in [0,1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("DdpgConfig: tau must be in (0,1]");
  if (lr_actor <= 0.0 || lr_critic <= 0.0) throw std::invalid_argument("DdpgConfig: learning rates must be positive");
  if (batch_size < 1 || capacity < 1) throw std::invalid_argument("DdpgConfig: batch and capacity must be positive");
  if (noise_sigma_start < 0.0 || noise_sigma_end < 0.0 || noise_decay_episodes < 1) {
    throw std::invalid_argument("DdpgConfig: bad exploration noise settings");
  }
  if (hidden_dims.empty()) throw std::invalid_argument("DdpgConfig: need at least one hidden layer");
  if (warmup < batch_size) throw std::invalid_argument("DdpgConfig: warmup must cover a batch");
}

double DdpgConfig::noise_sigma(int episode) const {
  const double f = std::clamp(static_cast<double>(episode) / noise_decay_episodes, 0.0, 1.0);
  return noise_sigma_start + f * (noise_sigma_end - noise_sigma_start);
}

double bellman_target(double reward, const std::vector<double>& next_state, bool done,
                      const Mlp& target_actor, const Mlp& target_critic, double gamma) {
  if (done) return reward;
  const std::vector<double> a = mlp_forward(target_actor, next_state);
  std::vector<double> sa = next_state;
  sa.insert(sa.end(), a.begin(), a.end());
  return reward + gamma * mlp_forward(target_critic, sa)[0];
}

double actor_act(const Mlp& actor, const std::vector<double>& state, double noise_sigma,
                 std::mt19937_64& rng) {
  double a = mlp_forward(actor, state)[0];
  if (noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sigma);
    a += noise(rng);
  }
  return std::clamp(a, kActionLow, kActionHigh);
}

DdpgAgent::DdpgAgent(int state_dim, const DdpgConfig& cfg, uint64_t seed)
    : cfg_(cfg), state_dim_(state_dim), opt_actor_(cfg.lr_actor), opt_critic_(cfg.lr_critic), rng_(seed) {
  cfg_.validate();
  std::vector<int> actor_dims = {state_dim};
  actor_dims.insert(actor_dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
  actor_dims.push_back(1);
  std::vector<int> critic_dims = {state_dim + 1};
  critic_dims.insert(critic_dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
  critic_dims.push_back(1);

  actor_ = Mlp::make(actor_dims, Mlp::Head::BoundedAction, rng_, kActionLow, kActionHigh);
  critic_ = Mlp::make(critic_dims, Mlp::Head::Linear, rng_);
  target_actor_ = actor_;
  target_critic_ = critic_;
  opt_actor_.init_like(actor_);
  opt_critic_.init_like(critic_);
  grads_actor_.init_like(actor_);
  grads_critic_.init_like(critic_);
  grads_probe_.init_like(critic_);
}

double DdpgAgent::act(const std::vector<double>& state, double noise_sigma) {
  return actor_act(actor_, state, noise_sigma, rng_);
}

double DdpgAgent::policy(const std::vector<double>& state) const {
  return mlp_forward(actor_, state)[0];
}

DdpgAgent::TrainResult DdpgAgent::train_step(const ReplayBuffer& buffer) {
  TrainResult result;
  if (buffer.size() < cfg_.batch_size || buffer.size() < cfg_.warmup) return result;
  const std::vector<int> batch = buffer.sample_indices(cfg_.batch_size, rng_);
  const double inv_b = 1.0 / cfg_.batch_size;

  // critic regression to Bellman targets
  grads_critic_.zero();
  double loss = 0.0;
  std::vector<double> sa;
  for (int idx : batch) {
    const Transition& t = buffer.at(idx);
    const bool done_eff = cfg_.cut_bootstrap_at_done && t.done;
    const double y =
        bellman_target(t.reward, t.next_state, done_eff, target_actor_, target_critic_, cfg_.gamma);
    sa = t.state;
    sa.push_back(t.action);
    const double q = mlp_forward(critic_, sa, &cache_c_)[0];
    loss += (q - y) * (q - y);
    mlp_backward(critic_, cache_c_, {2.0 * (q - y) * inv_b}, grads_critic_);
  }
  opt_critic_.step(critic_, grads_critic_);
  result.critic_loss = loss * inv_b;

  // actor ascent on the critic's value of its own actions
  grads_actor_.zero();
  double objective = 0.0;
  for (int idx : batch) {
    const Transition& t = buffer.at(idx);
    const double a = mlp_forward(actor_, t.state, &cache_a_)[0];
    sa = t.state;
    sa.push_back(a);
    objective += mlp_forward(critic_, sa, &cache_c_)[0];
    // only d_input is consumed here (it is replaced, not accumulated)
    mlp_backward(critic_, cache_c_, {1.0}, grads_probe_);
    const double dq_da = grads_probe_.d_input[state_dim_];
    mlp_backward(actor_, cache_a_, {-dq_da * inv_b}, grads_actor_);
  }
  opt_actor_.step(actor_, grads_actor_);
  result.actor_objective = objective * inv_b;

  soft_update(target_actor_, actor_, cfg_.tau);
  soft_update(target_critic_, critic_, cfg_.tau);
  result.trained = true;
  return result;
}

void DdpgAgent::save_actor(const std::string& path) const { save_mlp_file(actor_, path); }

void DdpgAgent::load_actor(const std::string& path) {
  Mlp loaded = load_mlp_file(path);
  if (loaded.dims != actor_.dims || loaded.head != actor_.head) {
    throw std::runtime_error("DdpgAgent: checkpoint architecture mismatch");
  }
  actor_ = std::move(loaded);
  target_actor_ = actor_;
}

}  // namespace ranslice
