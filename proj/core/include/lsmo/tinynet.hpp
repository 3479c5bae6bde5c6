#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace lsmo {

/// Dense feed-forward net: affine layers with ReLU on hidden layers and an
/// identity output layer. Batches are row-major (one sample per row).
struct DenseNet {
  std::vector<int> sizes;          // layer widths, sizes.front() = input dim
  std::vector<Eigen::MatrixXd> W;  // W[l] is sizes[l+1] x sizes[l]
  std::vector<Eigen::VectorXd> b;

  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }
  int num_layers() const { return static_cast<int>(W.size()); }
};

/// He-style scaled uniform init, U(-sqrt(6/fan_in), +sqrt(6/fan_in)), zero
/// biases. Deterministic per seed.
DenseNet init_net(const std::vector<int>& sizes, std::uint64_t seed);

/// Pre-activations and activations recorded by forward() for backward().
struct ForwardCache {
  Eigen::MatrixXd input;            // B x in
  std::vector<Eigen::MatrixXd> pre; // pre-activation per layer, B x out_l
  std::vector<Eigen::MatrixXd> act; // post-activation per layer
};

/// Per-parameter gradients, shaped like DenseNet::W / DenseNet::b.
struct NetGrads {
  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;

  static NetGrads zeros_like(const DenseNet& net);
  void setZero();
};

/// Forward pass. `cache`, when given, is filled for a later backward().
Eigen::MatrixXd forward(const DenseNet& net, const Eigen::MatrixXd& batch,
                        ForwardCache* cache = nullptr);

/// Exact gradients of the scalar loss whose gradient w.r.t. the outputs is
/// `upstream` (B x out). Accumulates into `grads` and returns the gradient
/// w.r.t. the input batch. Throws on a cache that does not match the net.
Eigen::MatrixXd backward(const DenseNet& net, const ForwardCache& cache,
                         const Eigen::MatrixXd& upstream, NetGrads& grads);

/// Standard bias-corrected Adam.
struct AdamState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long t = 0;
  std::vector<Eigen::MatrixXd> mW, vW;
  std::vector<Eigen::VectorXd> mb, vb;

  static AdamState for_net(const DenseNet& net, double lr);
};

/// One Adam update in place. Throws std::runtime_error naming the offending
/// parameter when a gradient is non-finite.
void adam_step(DenseNet& net, const NetGrads& grads, AdamState& state);

}  // namespace lsmo
