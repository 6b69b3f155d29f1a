#include "iabsim/rl_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "iabsim/error.hpp"

namespace iabsim {
namespace {

void check_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) throw Error(ErrorKind::Shape, "network needs at least input and output dims");
  for (int d : dims)
    if (d < 1) throw Error(ErrorKind::Shape, "layer dims must be positive");
}

void require_same_dims(const QNetwork& a, const QNetwork& b) {
  if (a.layer_dims() != b.layer_dims())
    throw Error(ErrorKind::Shape, "online and target networks have different dims");
}

// Forward pass that keeps every layer's activations (post-ReLU for hidden
// layers, raw for the output).
void forward_trace(const QNetwork& net, std::span<const double> x,
                   std::vector<std::vector<double>>& acts) {
  const auto& layers = net.layers();
  acts.resize(layers.size() + 1);
  acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const auto& in = acts[l];
    auto& out = acts[l + 1];
    out.resize(static_cast<std::size_t>(layer.out));
    const bool hidden = l + 1 < layers.size();
    for (int o = 0; o < layer.out; ++o) {
      const double* row = layer.weights.data() + static_cast<std::size_t>(o) * layer.in;
      double z = layer.biases[static_cast<std::size_t>(o)];
      for (int i = 0; i < layer.in; ++i) z += row[i] * in[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(o)] = hidden ? std::max(0.0, z) : z;
    }
  }
}

}  // namespace

QNetwork::QNetwork(std::vector<int> layer_dims) : dims_(std::move(layer_dims)) {
  check_dims(dims_);
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    DenseLayer layer;
    layer.in = dims_[l];
    layer.out = dims_[l + 1];
    layer.weights.assign(static_cast<std::size_t>(layer.in) * layer.out, 0.0);
    layer.biases.assign(static_cast<std::size_t>(layer.out), 0.0);
    layers_.push_back(std::move(layer));
  }
}

QNetwork QNetwork::glorot(std::vector<int> layer_dims, RandomStream& rng) {
  QNetwork net(std::move(layer_dims));
  for (auto& layer : net.layers_) {
    const double limit = std::sqrt(6.0 / (layer.in + layer.out));
    for (auto& w : layer.weights) w = rng.uniform(-limit, limit);
  }
  return net;
}

std::vector<double> QNetwork::forward(std::span<const double> x) const {
  if (dims_.empty() || x.size() != static_cast<std::size_t>(input_dim())) {
    throw Error(ErrorKind::Shape, "input has " + std::to_string(x.size()) +
                                      " entries, network expects " +
                                      std::to_string(dims_.empty() ? 0 : input_dim()));
  }
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    next.assign(static_cast<std::size_t>(layer.out), 0.0);
    const bool hidden = l + 1 < layers_.size();
    for (int o = 0; o < layer.out; ++o) {
      const double* row = layer.weights.data() + static_cast<std::size_t>(o) * layer.in;
      double z = layer.biases[static_cast<std::size_t>(o)];
      for (int i = 0; i < layer.in; ++i) z += row[i] * cur[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(o)] = hidden ? std::max(0.0, z) : z;
    }
    cur.swap(next);
  }
  return cur;
}

bool QNetwork::all_finite() const {
  for (const auto& layer : layers_) {
    for (double v : layer.weights)
      if (!std::isfinite(v)) return false;
    for (double v : layer.biases)
      if (!std::isfinite(v)) return false;
  }
  return true;
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weights.size() + layer.biases.size();
  return n;
}

std::vector<double> mlp_forward(const QNetwork& net, std::span<const double> x) {
  return net.forward(x);
}

ParamTensors zeros_like(const QNetwork& net) {
  ParamTensors out = net.layers();
  for (auto& layer : out) {
    std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
    std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
  }
  return out;
}

AdamState AdamState::for_network(const QNetwork& net) {
  AdamState s;
  s.first_moment = zeros_like(net);
  s.second_moment = zeros_like(net);
  return s;
}

void adam_step(QNetwork& net, AdamState& adam, const ParamTensors& grads, double learning_rate) {
  auto& layers = net.layers();
  if (grads.size() != layers.size() || adam.first_moment.size() != layers.size())
    throw Error(ErrorKind::Shape, "Adam state does not match network");
  ++adam.step_count;
  const double t = static_cast<double>(adam.step_count);
  const double c1 = 1.0 - std::pow(adam.beta1, t);
  const double c2 = 1.0 - std::pow(adam.beta2, t);

  auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g[i];
      v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + adam.eps_hat);
    }
  };
  for (std::size_t l = 0; l < layers.size(); ++l) {
    update(layers[l].weights, grads[l].weights, adam.first_moment[l].weights,
           adam.second_moment[l].weights);
    update(layers[l].biases, grads[l].biases, adam.first_moment[l].biases,
           adam.second_moment[l].biases);
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error(ErrorKind::Config, "replay capacity must be positive");
}

void ReplayBuffer::push(Transition tr) {
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(std::move(tr));
}

std::vector<Transition> ReplayBuffer::sample(std::size_t m, RandomStream& rng) const {
  if (items_.size() < m) {
    throw Error(ErrorKind::InsufficientData, "replay holds " + std::to_string(items_.size()) +
                                                 " transitions, batch needs " + std::to_string(m));
  }
  std::vector<Transition> batch;
  batch.reserve(m);
  for (std::size_t k = 0; k < m; ++k) batch.push_back(items_[rng.index(items_.size())]);
  return batch;
}

void EpsilonSchedule::validate() const {
  if (!(decay >= 0.0 && decay <= 1.0)) throw Error(ErrorKind::Config, "epsilon decay must be in [0, 1]");
  if (!(epsilon_min <= epsilon0)) throw Error(ErrorKind::Config, "epsilon_min must not exceed epsilon0");
  if (!(epsilon_min >= 0.0 && epsilon0 <= 1.0)) throw Error(ErrorKind::Config, "epsilon must lie in [0, 1]");
}

double epsilon_at(const EpsilonSchedule& sched, std::int64_t t) {
  return std::max(sched.epsilon_min, sched.epsilon0 * std::pow(sched.decay, static_cast<double>(t)));
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
  if (!(learning_rate > 0.0)) fail("learning rate must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma must lie in [0, 1]");
  if (batch_size < 1) fail("batch size must be positive");
  if (target_sync_interval < 1) fail("target sync interval must be positive");
  if (episodes < 1) fail("episode count must be positive");
  if (replay_capacity < batch_size) fail("replay capacity must be at least the batch size");
  if (hidden_units < 1) fail("hidden units must be positive");
  if (updates_per_step < 1) fail("updates per step must be positive");
}

int argmax_legal(std::span<const double> q, std::span<const std::uint8_t> legal) {
  int best = -1;
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (!legal.empty() && (a >= legal.size() || !legal[a])) continue;
    if (best < 0 || q[a] > q[static_cast<std::size_t>(best)]) best = static_cast<int>(a);
  }
  return best;
}

double ddqn_target(const Transition& tr, const QNetwork& online, const QNetwork& target,
                   double gamma) {
  require_same_dims(online, target);
  if (tr.terminal) return tr.reward;
  const auto q_online = online.forward(tr.next_state);
  const int a_star = argmax_legal(q_online, tr.next_legal);
  if (a_star < 0) return tr.reward;
  const auto q_target = target.forward(tr.next_state);
  return tr.reward + gamma * q_target[static_cast<std::size_t>(a_star)];
}

double batch_loss(const QNetwork& net, std::span<const Transition> batch,
                  std::span<const double> targets) {
  double sum = 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto q = net.forward(batch[k].state);
    const double d = q.at(static_cast<std::size_t>(batch[k].action)) - targets[k];
    sum += d * d;
  }
  return sum / static_cast<double>(batch.size());
}

ParamTensors batch_gradient(const QNetwork& net, std::span<const Transition> batch,
                            std::span<const double> targets, double* loss_out) {
  if (batch.empty()) throw Error(ErrorKind::InsufficientData, "empty training batch");
  ParamTensors grads = zeros_like(net);
  const auto& layers = net.layers();
  const double scale = 2.0 / static_cast<double>(batch.size());
  std::vector<std::vector<double>> acts;
  std::vector<double> delta;
  std::vector<double> prev_delta;
  double loss = 0.0;

  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto& tr = batch[k];
    if (tr.state.size() != static_cast<std::size_t>(net.input_dim()))
      throw Error(ErrorKind::Shape, "transition state size does not match network input");
    if (tr.action < 0 || tr.action >= net.output_dim())
      throw Error(ErrorKind::Shape, "transition action outside network output range");
    forward_trace(net, tr.state, acts);
    const double err = acts.back()[static_cast<std::size_t>(tr.action)] - targets[k];
    loss += err * err;

    delta.assign(static_cast<std::size_t>(net.output_dim()), 0.0);
    delta[static_cast<std::size_t>(tr.action)] = scale * err;

    for (std::size_t l = layers.size(); l-- > 0;) {
      const auto& layer = layers[l];
      auto& g = grads[l];
      const auto& in = acts[l];
      for (int o = 0; o < layer.out; ++o) {
        const double d = delta[static_cast<std::size_t>(o)];
        if (d == 0.0) continue;
        g.biases[static_cast<std::size_t>(o)] += d;
        double* grow = g.weights.data() + static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) grow[i] += d * in[static_cast<std::size_t>(i)];
      }
      if (l == 0) break;
      prev_delta.assign(static_cast<std::size_t>(layer.in), 0.0);
      for (int o = 0; o < layer.out; ++o) {
        const double d = delta[static_cast<std::size_t>(o)];
        if (d == 0.0) continue;
        const double* row = layer.weights.data() + static_cast<std::size_t>(o) * layer.in;
        for (int i = 0; i < layer.in; ++i) prev_delta[static_cast<std::size_t>(i)] += d * row[i];
      }
      // ReLU derivative: hidden activation > 0.
      for (int i = 0; i < layer.in; ++i)
        if (in[static_cast<std::size_t>(i)] <= 0.0) prev_delta[static_cast<std::size_t>(i)] = 0.0;
      delta.swap(prev_delta);
    }
  }
  if (loss_out) *loss_out = loss / static_cast<double>(batch.size());
  return grads;
}

double train_on_batch(QNetwork& online, const QNetwork& target, std::span<const Transition> batch,
                      const TrainConfig& cfg, AdamState& adam) {
  require_same_dims(online, target);
  if (batch.empty()) throw Error(ErrorKind::InsufficientData, "empty training batch");
  std::vector<double> y;
  y.reserve(batch.size());
  for (const auto& tr : batch) y.push_back(ddqn_target(tr, online, target, cfg.gamma));

  double loss = 0.0;
  const auto grads = batch_gradient(online, batch, y, &loss);
  if (!std::isfinite(loss))
    throw NumericError("non-finite loss at optimizer step " + std::to_string(adam.step_count),
                       adam.step_count);
  adam_step(online, adam, grads, cfg.learning_rate);
  return loss;
}

void sync_target(const QNetwork& online, QNetwork& target) {
  if (!target.layer_dims().empty()) require_same_dims(online, target);
  target = online;
}

}  // namespace iabsim
