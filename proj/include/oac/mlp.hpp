#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "oac/rng.hpp"

namespace oac {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Parameters of a feed-forward network: affine layers with ReLU on hidden
// layers and identity on the output. Consecutive layer dimensions must
// chain (out of layer k == in of layer k+1).
struct MlpParams {
  struct Layer {
    MatrixXd W;  // out x in
    VectorXd b;  // out
  };
  std::vector<Layer> layers;

  int in_dim() const { return static_cast<int>(layers.front().W.cols()); }
  int out_dim() const { return static_cast<int>(layers.back().W.rows()); }
  std::size_t param_count() const;
  bool same_shape(const MlpParams& other) const;
};

// Fresh network with entries uniform in +-1/sqrt(fan_in) per layer.
// dims = {in, hidden..., out}.
MlpParams make_mlp(const std::vector<int>& dims, Rng& rng);

// Zero-valued parameter set with the same shapes as `like` (gradient and
// moment accumulators).
MlpParams zeros_like(const MlpParams& like);

/// Forward pass, single input.
VectorXd mlp_forward(const MlpParams& p, const VectorXd& x);

/// Forward pass, one sample per column.
MatrixXd mlp_forward_batch(const MlpParams& p, const MatrixXd& X);

// Gradients of upstream . output with respect to every parameter and to
// the input vector.
struct GradBundle {
  MlpParams params;
  VectorXd input;
};

// Batched variant: parameter gradients are summed over columns, input
// gradients kept per column.
struct BatchGradBundle {
  MlpParams params;
  MatrixXd inputs;
};

GradBundle mlp_backward(const MlpParams& p, const VectorXd& x,
                        const VectorXd& upstream);
BatchGradBundle mlp_backward_batch(const MlpParams& p, const MatrixXd& X,
                                   const MatrixXd& upstream);

// Adam accumulators. beta1/beta2/eps are fixed; the step counter drives
// bias correction.
struct AdamState {
  MlpParams m;
  MlpParams v;
  long long step = 0;

  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
};

AdamState make_adam_state(const MlpParams& like);

// One bias-corrected Adam descent step on `grads`. Callers wanting ascent
// negate the gradients. Throws on non-finite gradients with params and
// state untouched.
void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads,
               double lr);

// target <- tau * online + (1 - tau) * target, elementwise.
void polyak_update(MlpParams& target, const MlpParams& online, double tau);

bool all_finite(const MlpParams& p);

// Flat views used by the parameter dump and trajectory hashing. Order:
// layer 0 W (row-major), layer 0 b, layer 1 W, ...
void append_flat(const MlpParams& p, std::vector<double>& out);
void load_flat(MlpParams& p, const double* data, std::size_t count);

}  // namespace oac
