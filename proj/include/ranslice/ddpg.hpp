#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ranslice/mlp.hpp"

namespace ranslice {

struct Transition {
  std::vector<double> state;
  double action = 0.0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

// Ring buffer of transitions, overwrite-oldest on overflow. Batch
// sampling is uniform without replacement within the batch.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);

  void push(Transition t);
  int size() const { return size_; }
  int capacity() const { return capacity_; }
  const Transition& at(int i) const { return storage_[i]; }

  std::vector<int> sample_indices(int batch, std::mt19937_64& rng) const;

 private:
  int capacity_;
  int size_ = 0;
  int head_ = 0;
  std::vector<Transition> storage_;
};

struct DdpgConfig {
  double gamma = 0.99;
  double tau = 0.005;
  double lr_actor = 1e-4;
  double lr_critic = 1e-3;
  int batch_size = 64;
  int capacity = 100000;
  double noise_sigma_start = 0.2;
  double noise_sigma_end = 0.02;
  int noise_decay_episodes = 1000;
  std::vector<int> hidden_dims = {64, 64};
  int warmup = 1000;  // transitions before training starts
  // The environment has no true terminal state; episode ends are time
  // limits, so by default the target bootstraps through done flags.
  bool cut_bootstrap_at_done = false;

  void validate() const;
  double noise_sigma(int episode) const;
};

// y = reward + (done ? 0 : gamma * Qt(s', mu_t(s'))).
double bellman_target(double reward, const std::vector<double>& next_state, bool done,
                      const Mlp& target_actor, const Mlp& target_critic, double gamma);

// Exploration step: clamp(mu(s) + gaussian(0, sigma), 0.1, 0.9).
double actor_act(const Mlp& actor, const std::vector<double>& state, double noise_sigma,
                 std::mt19937_64& rng);

class DdpgAgent {
 public:
  DdpgAgent(int state_dim, const DdpgConfig& cfg, uint64_t seed);

  double act(const std::vector<double>& state, double noise_sigma);
  double policy(const std::vector<double>& state) const;  // noise-free

  struct TrainResult {
    bool trained = false;
    double critic_loss = 0.0;
    double actor_objective = 0.0;
  };
  // One critic + actor update on a sampled batch, then soft target
  // updates. No-op (trained=false) while the buffer is short.
  TrainResult train_step(const ReplayBuffer& buffer);

  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Mlp& target_actor() const { return target_actor_; }
  const Mlp& target_critic() const { return target_critic_; }
  const DdpgConfig& cfg() const { return cfg_; }
  std::mt19937_64& rng() { return rng_; }

  void save_actor(const std::string& path) const;
  void load_actor(const std::string& path);

 private:
  DdpgConfig cfg_;
  int state_dim_;
  Mlp actor_, critic_, target_actor_, target_critic_;
  Adam opt_actor_, opt_critic_;
  std::mt19937_64 rng_;

  // scratch reused across train steps
  Gradients grads_actor_, grads_critic_, grads_probe_;
  ForwardCache cache_a_, cache_c_;
};

}  // namespace ranslice
