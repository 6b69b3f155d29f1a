#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "iabsim/random.hpp"

namespace iabsim {

// Fully connected layer, weights stored row-major as [out][in].
struct DenseLayer {
  int in = 0;
  int out = 0;
  std::vector<double> weights;
  std::vector<double> biases;

  double& w(int o, int i) { return weights[static_cast<std::size_t>(o) * in + i]; }
  double w(int o, int i) const { return weights[static_cast<std::size_t>(o) * in + i]; }

  bool operator==(const DenseLayer&) const = default;
};

// MLP Q-function approximator: ReLU hidden layers, identity output.
class QNetwork {
 public:
  QNetwork() = default;

  // Zero-initialized network with the given layer sizes (input, hidden..., output).
  explicit QNetwork(std::vector<int> layer_dims);

  // Glorot-uniform weights, zero biases.
  static QNetwork glorot(std::vector<int> layer_dims, RandomStream& rng);

  const std::vector<int>& layer_dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }

  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  std::vector<double> forward(std::span<const double> x) const;

  bool all_finite() const;
  std::size_t parameter_count() const;

  bool operator==(const QNetwork&) const = default;

 private:
  std::vector<int> dims_;
  std::vector<DenseLayer> layers_;
};

std::vector<double> mlp_forward(const QNetwork& net, std::span<const double> x);

// Same shape as a network's parameters; used for gradients and Adam moments.
using ParamTensors = std::vector<DenseLayer>;

ParamTensors zeros_like(const QNetwork& net);

struct AdamState {
  ParamTensors first_moment;
  ParamTensors second_moment;
  std::int64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;

  static AdamState for_network(const QNetwork& net);

  bool operator==(const AdamState&) const = default;
};

void adam_step(QNetwork& net, AdamState& adam, const ParamTensors& grads, double learning_rate);

struct Transition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
  // Legal actions in next_state; empty means every action is legal.
  std::vector<std::uint8_t> next_legal;
};

// Bounded FIFO; oldest transitions are evicted first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 10000);

  void push(Transition tr);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  // i = 0 is the oldest retained transition.
  const Transition& at(std::size_t i) const { return items_.at(i); }

  // M draws uniformly with replacement. Throws Error(InsufficientData) when
  // fewer than M transitions are stored.
  std::vector<Transition> sample(std::size_t m, RandomStream& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

struct EpsilonSchedule {
  double epsilon0 = 0.9;
  double decay = 0.995;
  double epsilon_min = 0.01;

  void validate() const;
  bool operator==(const EpsilonSchedule&) const = default;
};

// max(epsilon_min, epsilon0 * decay^t)
double epsilon_at(const EpsilonSchedule& sched, std::int64_t t);

struct TrainConfig {
  double learning_rate = 0.001;
  double gamma = 0.99;
  int batch_size = 32;
  int target_sync_interval = 2;
  int episodes = 1000;
  std::uint64_t seed = 1;
  int replay_capacity = 10000;
  int hidden_units = 32;
  // Gradient steps taken per environment step once the buffer holds a batch.
  int updates_per_step = 1;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// argmax over legal entries; ties resolve to the lower index. Returns -1 if
// nothing is legal.
int argmax_legal(std::span<const double> q, std::span<const std::uint8_t> legal);

// Double-Q target: r if terminal, else r + gamma * Q_target(s', argmax_a Q_online(s', a)).
double ddqn_target(const Transition& tr, const QNetwork& online, const QNetwork& target,
                   double gamma);

// Mean over the batch of (y_k - Q(s_k, a_k))^2 for fixed targets y.
double batch_loss(const QNetwork& net, std::span<const Transition> batch,
                  std::span<const double> targets);

// Analytic gradient of batch_loss with respect to the network parameters.
// Only the taken action's output contributes.
ParamTensors batch_gradient(const QNetwork& net, std::span<const Transition> batch,
                            std::span<const double> targets, double* loss_out = nullptr);

// One Adam step on the batch's mean squared Bellman error. Returns the
// pre-update loss; throws NumericError on a non-finite loss.
double train_on_batch(QNetwork& online, const QNetwork& target, std::span<const Transition> batch,
                      const TrainConfig& cfg, AdamState& adam);

void sync_target(const QNetwork& online, QNetwork& target);

// Binary little-endian checkpoint; see checkpoint.cpp for the layout.
inline constexpr std::uint16_t kCheckpointVersion = 1;

void checkpoint_save(const QNetwork& net, const AdamState& adam, const std::filesystem::path& path);
std::pair<QNetwork, AdamState> checkpoint_load(const std::filesystem::path& path);

std::vector<std::uint8_t> checkpoint_encode(const QNetwork& net, const AdamState& adam);
std::pair<QNetwork, AdamState> checkpoint_decode(std::span<const std::uint8_t> bytes);

}  // namespace iabsim
