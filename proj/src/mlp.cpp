#include "oac/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace oac {

namespace {

void check_chain(const MlpParams& p) {
  if (p.layers.empty()) throw std::invalid_argument("mlp: no layers");
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    const auto& l = p.layers[k];
    if (l.W.rows() != l.b.size())
      throw std::invalid_argument("mlp: bias size mismatch in layer " +
                                  std::to_string(k));
    if (k > 0 && p.layers[k - 1].W.rows() != l.W.cols())
      throw std::invalid_argument("mlp: layer dimensions do not chain at " +
                                  std::to_string(k));
  }
}

}  // namespace

std::size_t MlpParams::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.W.size() + l.b.size();
  return n;
}

bool MlpParams::same_shape(const MlpParams& other) const {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (layers[k].W.rows() != other.layers[k].W.rows() ||
        layers[k].W.cols() != other.layers[k].W.cols())
      return false;
  }
  return true;
}

MlpParams make_mlp(const std::vector<int>& dims, Rng& rng) {
  if (dims.size() < 2) throw std::invalid_argument("make_mlp: need >= 2 dims");
  MlpParams p;
  p.layers.resize(dims.size() - 1);
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    const int in = dims[k];
    const int out = dims[k + 1];
    if (in < 1 || out < 1)
      throw std::invalid_argument("make_mlp: nonpositive layer dim");
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    auto& l = p.layers[k];
    l.W.resize(out, in);
    l.b.resize(out);
    // Row-major fill order so the draw sequence matches the dump layout.
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) l.W(r, c) = rng.uniform(-bound, bound);
    for (int r = 0; r < out; ++r) l.b(r) = rng.uniform(-bound, bound);
  }
  return p;
}

MlpParams zeros_like(const MlpParams& like) {
  MlpParams z;
  z.layers.resize(like.layers.size());
  for (std::size_t k = 0; k < like.layers.size(); ++k) {
    z.layers[k].W = MatrixXd::Zero(like.layers[k].W.rows(),
                                   like.layers[k].W.cols());
    z.layers[k].b = VectorXd::Zero(like.layers[k].b.size());
  }
  return z;
}

MatrixXd mlp_forward_batch(const MlpParams& p, const MatrixXd& X) {
  check_chain(p);
  if (X.rows() != p.in_dim())
    throw std::invalid_argument("mlp_forward: input has " +
                                std::to_string(X.rows()) + " rows, expected " +
                                std::to_string(p.in_dim()));
  MatrixXd h = X;
  for (std::size_t k = 0; k < p.layers.size(); ++k) {
    h = (p.layers[k].W * h).colwise() + p.layers[k].b;
    if (k + 1 < p.layers.size()) h = h.cwiseMax(0.0);
  }
  return h;
}

VectorXd mlp_forward(const MlpParams& p, const VectorXd& x) {
  return mlp_forward_batch(p, MatrixXd(x)).col(0);
}

BatchGradBundle mlp_backward_batch(const MlpParams& p, const MatrixXd& X,
                                   const MatrixXd& upstream) {
  check_chain(p);
  if (X.rows() != p.in_dim())
    throw std::invalid_argument("mlp_backward: input dim mismatch");
  if (upstream.rows() != p.out_dim() || upstream.cols() != X.cols())
    throw std::invalid_argument("mlp_backward: upstream shape mismatch");

  const std::size_t L = p.layers.size();
  // Recompute the forward pass, keeping post-activation values per layer.
  std::vector<MatrixXd> act(L);  // act[k] = input fed into layer k
  MatrixXd h = X;
  for (std::size_t k = 0; k < L; ++k) {
    act[k] = h;
    h = (p.layers[k].W * h).colwise() + p.layers[k].b;
    if (k + 1 < L) h = h.cwiseMax(0.0);
  }

  BatchGradBundle g;
  g.params = zeros_like(p);
  MatrixXd delta = upstream;  // dObj/d(pre-activation of layer k)
  for (std::size_t k = L; k-- > 0;) {
    g.params.layers[k].W.noalias() = delta * act[k].transpose();
    g.params.layers[k].b = delta.rowwise().sum();
    MatrixXd back = p.layers[k].W.transpose() * delta;
    if (k > 0) {
      // ReLU mask of the previous layer's pre-activation; derivative at
      // exactly zero is taken as zero.
      const MatrixXd pre =
          (p.layers[k - 1].W * act[k - 1]).colwise() + p.layers[k - 1].b;
      delta = (pre.array() > 0.0).select(back, 0.0);
    } else {
      delta = back;
    }
  }
  g.inputs = delta;
  return g;
}

GradBundle mlp_backward(const MlpParams& p, const VectorXd& x,
                        const VectorXd& upstream) {
  BatchGradBundle bg = mlp_backward_batch(p, MatrixXd(x), MatrixXd(upstream));
  return GradBundle{std::move(bg.params), bg.inputs.col(0)};
}

AdamState make_adam_state(const MlpParams& like) {
  AdamState st;
  st.m = zeros_like(like);
  st.v = zeros_like(like);
  st.step = 0;
  return st;
}

void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads,
               double lr) {
  if (lr <= 0.0) throw std::invalid_argument("adam_step: lr must be positive");
  if (!params.same_shape(grads) || !params.same_shape(state.m))
    throw std::invalid_argument("adam_step: shape mismatch");
  if (!all_finite(grads))
    throw std::runtime_error("adam_step: non-finite gradient");

  const long long t = state.step + 1;
  const double bc1 = 1.0 - std::pow(AdamState::kBeta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(AdamState::kBeta2, static_cast<double>(t));
  auto update = [&](auto& w, auto& m, auto& v, const auto& g) {
    m = AdamState::kBeta1 * m + (1.0 - AdamState::kBeta1) * g;
    v.array() = AdamState::kBeta2 * v.array() +
                (1.0 - AdamState::kBeta2) * g.array().square();
    w.array() -= lr * (m.array() / bc1) /
                 ((v.array() / bc2).sqrt() + AdamState::kEps);
  };
  for (std::size_t k = 0; k < params.layers.size(); ++k) {
    update(params.layers[k].W, state.m.layers[k].W, state.v.layers[k].W,
           grads.layers[k].W);
    update(params.layers[k].b, state.m.layers[k].b, state.v.layers[k].b,
           grads.layers[k].b);
  }
  state.step = t;
}

void polyak_update(MlpParams& target, const MlpParams& online, double tau) {
  if (tau < 0.0 || tau > 1.0)
    throw std::invalid_argument("polyak_update: tau outside [0, 1]");
  if (!target.same_shape(online))
    throw std::invalid_argument("polyak_update: shape mismatch");
  for (std::size_t k = 0; k < target.layers.size(); ++k) {
    target.layers[k].W =
        tau * online.layers[k].W + (1.0 - tau) * target.layers[k].W;
    target.layers[k].b =
        tau * online.layers[k].b + (1.0 - tau) * target.layers[k].b;
  }
}

bool all_finite(const MlpParams& p) {
  for (const auto& l : p.layers)
    if (!l.W.allFinite() || !l.b.allFinite()) return false;
  return true;
}

void append_flat(const MlpParams& p, std::vector<double>& out) {
  for (const auto& l : p.layers) {
    for (Eigen::Index r = 0; r < l.W.rows(); ++r)
      for (Eigen::Index c = 0; c < l.W.cols(); ++c) out.push_back(l.W(r, c));
    for (Eigen::Index r = 0; r < l.b.size(); ++r) out.push_back(l.b(r));
  }
}

void load_flat(MlpParams& p, const double* data, std::size_t count) {
  if (count != p.param_count())
    throw std::invalid_argument("load_flat: element count mismatch");
  std::size_t i = 0;
  for (auto& l : p.layers) {
    for (Eigen::Index r = 0; r < l.W.rows(); ++r)
      for (Eigen::Index c = 0; c < l.W.cols(); ++c) l.W(r, c) = data[i++];
    for (Eigen::Index r = 0; r < l.b.size(); ++r) l.b(r) = data[i++];
  }
}

}  // namespace oac
