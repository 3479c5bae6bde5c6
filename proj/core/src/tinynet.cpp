#include "lsmo/tinynet.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lsmo/rng.hpp"

namespace lsmo {

DenseNet init_net(const std::vector<int>& sizes, std::uint64_t seed) {
  if (sizes.size() < 2) {
    throw std::invalid_argument("init_net: need at least input and output layer");
  }
  for (int s : sizes) {
    if (s <= 0) throw std::invalid_argument("init_net: layer sizes must be positive");
  }
  DenseNet net;
  net.sizes = sizes;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l];
    const int out = sizes[l + 1];
    const double half_width = std::sqrt(6.0 / in);
    Eigen::MatrixXd W(out, in);
    for (int i = 0; i < out; ++i) {
      for (int j = 0; j < in; ++j) {
        W(i, j) = rng.uniform(-half_width, half_width);
      }
    }
    net.W.push_back(std::move(W));
    net.b.push_back(Eigen::VectorXd::Zero(out));
  }
  return net;
}

NetGrads NetGrads::zeros_like(const DenseNet& net) {
  NetGrads g;
  for (int l = 0; l < net.num_layers(); ++l) {
    g.dW.push_back(Eigen::MatrixXd::Zero(net.W[l].rows(), net.W[l].cols()));
    g.db.push_back(Eigen::VectorXd::Zero(net.b[l].size()));
  }
  return g;
}

void NetGrads::setZero() {
  for (auto& m : dW) m.setZero();
  for (auto& v : db) v.setZero();
}

Eigen::MatrixXd forward(const DenseNet& net, const Eigen::MatrixXd& batch,
                        ForwardCache* cache) {
  if (batch.cols() != net.input_dim()) {
    throw std::invalid_argument("forward: batch width " + std::to_string(batch.cols()) +
                                " != input dim " + std::to_string(net.input_dim()));
  }
  const int L = net.num_layers();
  if (cache) {
    cache->input = batch;
    cache->pre.assign(L, {});
    cache->act.assign(L, {});
  }
  Eigen::MatrixXd x = batch;
  for (int l = 0; l < L; ++l) {
    Eigen::MatrixXd z = (x * net.W[l].transpose()).rowwise() + net.b[l].transpose();
    if (cache) cache->pre[l] = z;
    if (l + 1 < L) {
      x = z.cwiseMax(0.0);  // ReLU on hidden layers
    } else {
      x = std::move(z);  // identity output
    }
    if (cache) cache->act[l] = x;
  }
  return x;
}

Eigen::MatrixXd backward(const DenseNet& net, const ForwardCache& cache,
                         const Eigen::MatrixXd& upstream, NetGrads& grads) {
  const int L = net.num_layers();
  if (static_cast<int>(cache.pre.size()) != L || cache.input.cols() != net.input_dim()) {
    throw std::invalid_argument("backward: cache does not match net");
  }
  if (upstream.rows() != cache.input.rows() || upstream.cols() != net.output_dim()) {
    throw std::invalid_argument("backward: upstream shape mismatch");
  }
  if (static_cast<int>(grads.dW.size()) != L) {
    throw std::invalid_argument("backward: grads shape mismatch");
  }

  Eigen::MatrixXd delta = upstream;
  for (int l = L - 1; l >= 0; --l) {
    const Eigen::MatrixXd& below = (l == 0) ? cache.input : cache.act[l - 1];
    grads.dW[l].noalias() += delta.transpose() * below;
    grads.db[l] += delta.colwise().sum().transpose();
    Eigen::MatrixXd dx = delta * net.W[l];
    if (l > 0) {
      // ReLU derivative from the cached pre-activation of the layer below
      delta = dx.cwiseProduct((cache.pre[l - 1].array() > 0.0).cast<double>().matrix());
    } else {
      delta = std::move(dx);
    }
  }
  return delta;
}

AdamState AdamState::for_net(const DenseNet& net, double lr) {
  AdamState s;
  s.lr = lr;
  for (int l = 0; l < net.num_layers(); ++l) {
    s.mW.push_back(Eigen::MatrixXd::Zero(net.W[l].rows(), net.W[l].cols()));
    s.vW.push_back(Eigen::MatrixXd::Zero(net.W[l].rows(), net.W[l].cols()));
    s.mb.push_back(Eigen::VectorXd::Zero(net.b[l].size()));
    s.vb.push_back(Eigen::VectorXd::Zero(net.b[l].size()));
  }
  return s;
}

namespace {

template <typename Param, typename Grad, typename Mom>
void adam_update(Param& p, const Grad& g, Mom& m, Mom& v, const AdamState& s,
                 double corr1, double corr2, const char* what, int layer) {
  if (!g.allFinite()) {
    throw std::runtime_error(std::string("adam_step: non-finite gradient in ") + what +
                             " of layer " + std::to_string(layer));
  }
  m = s.beta1 * m + (1.0 - s.beta1) * g;
  v = s.beta2 * v + (1.0 - s.beta2) * g.cwiseProduct(g);
  p.array() -= s.lr * (m.array() / corr1) / ((v.array() / corr2).sqrt() + s.eps);
}

}  // namespace

void adam_step(DenseNet& net, const NetGrads& grads, AdamState& state) {
  state.t += 1;
  const double corr1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double corr2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (int l = 0; l < net.num_layers(); ++l) {
    adam_update(net.W[l], grads.dW[l], state.mW[l], state.vW[l], state, corr1, corr2,
                "weights", l);
    adam_update(net.b[l], grads.db[l], state.mb[l], state.vb[l], state, corr1, corr2,
                "biases", l);
  }
}

}  // namespace lsmo
