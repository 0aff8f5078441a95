#include "gaitforge/nncore.hpp"

#include <cmath>

namespace gaitforge::nn {

Mlp::Mlp(std::vector<int> layer_sizes) : layer_sizes_(std::move(layer_sizes)) {
  if (layer_sizes_.size() < 2) throw ShapeMismatch("Mlp needs at least input and output sizes");
  num_params_ = 0;
  for (size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    if (in <= 0 || out <= 0) throw ShapeMismatch("layer sizes must be positive");
    weights_.emplace_back(Matrix::Zero(out, in));
    biases_.emplace_back(Vector::Zero(out));
    num_params_ += out * in + out;
  }
}

void Mlp::init(uint64_t seed, double gain, double output_gain) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (size_t l = 0; l < weights_.size(); ++l) {
    Matrix& w = weights_[l];
    const long rows = w.rows(), cols = w.cols();
    Matrix g(std::max(rows, cols), std::min(rows, cols));
    for (long i = 0; i < g.rows(); ++i) {
      for (long j = 0; j < g.cols(); ++j) g(i, j) = normal(rng);
    }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(g.rows(), g.cols());
    // Fix signs so the factorization is unique.
    Matrix r = qr.matrixQR().topRows(g.cols()).triangularView<Eigen::Upper>();
    for (long j = 0; j < g.cols(); ++j) {
      if (r(j, j) < 0) q.col(j) *= -1.0;
    }
    const double scale = (l + 1 == weights_.size()) ? output_gain : gain;
    w = scale * (rows <= cols ? Matrix(q.transpose()) : q);
    biases_[l].setZero();
  }
}

void Mlp::check_input(const Matrix& x) const {
  if (x.rows() != input_dim()) {
    throw ShapeMismatch("input has " + std::to_string(x.rows()) + " rows, expected " +
                        std::to_string(input_dim()));
  }
  if (!x.allFinite()) throw ShapeMismatch("non-finite input");
}

Matrix Mlp::forward(const Matrix& x) const {
  check_input(x);
  Matrix a = x;
  for (size_t l = 0; l < weights_.size(); ++l) {
    Matrix z = (weights_[l] * a).colwise() + biases_[l];
    a = (l + 1 < weights_.size()) ? z.array().tanh().matrix() : z;
  }
  return a;
}

Matrix Mlp::forward(const Matrix& x, Cache& cache) const {
  check_input(x);
  cache.activations.clear();
  cache.pre.clear();
  cache.activations.push_back(x);
  Matrix a = x;
  for (size_t l = 0; l < weights_.size(); ++l) {
    Matrix z = (weights_[l] * a).colwise() + biases_[l];
    cache.pre.push_back(z);
    a = (l + 1 < weights_.size()) ? z.array().tanh().matrix() : z;
    cache.activations.push_back(a);
  }
  return a;
}

Vector Mlp::forward1(const Vector& x) const { return forward(Matrix(x)); }

Vector Mlp::backward(const Cache& cache, const Matrix& upstream, Matrix* input_grad) const {
  const size_t nl = weights_.size();
  if (cache.pre.size() != nl) throw ShapeMismatch("backward before forward");
  if (upstream.rows() != output_dim() || upstream.cols() != cache.activations.front().cols()) {
    throw ShapeMismatch("upstream gradient shape mismatch");
  }

  Vector grad(num_params_);
  // Parameter offsets in declaration order.
  std::vector<int> offsets(nl);
  int off = 0;
  for (size_t l = 0; l < nl; ++l) {
    offsets[l] = off;
    off += int(weights_[l].size() + biases_[l].size());
  }

  Matrix delta = upstream;  // dL/dz for the output layer (identity activation)
  for (size_t li = nl; li-- > 0;) {
    if (li + 1 < nl) {
      // Through the tanh of layer li.
      delta = (delta.array() * (1.0 - cache.activations[li + 1].array().square())).matrix();
    }
    Matrix dw = delta * cache.activations[li].transpose();
    Vector db = delta.rowwise().sum();
    Eigen::Map<Matrix>(grad.data() + offsets[li], dw.cols(), dw.rows()) = dw.transpose();
    grad.segment(offsets[li] + dw.size(), db.size()) = db;
    if (li > 0 || input_grad) delta = weights_[li].transpose() * delta;
    if (li == 0 && input_grad) *input_grad = delta;
  }
  return grad;
}

Matrix Mlp::jvp_params(const Matrix& x, const Vector& v) const {
  check_input(x);
  if (v.size() != num_params_) throw ShapeMismatch("direction length mismatch");

  Matrix a = x;
  Matrix da = Matrix::Zero(x.rows(), x.cols());
  int off = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    const Matrix& w = weights_[l];
    Eigen::Map<const Matrix> dw_t(v.data() + off, w.cols(), w.rows());
    off += int(w.size());
    Eigen::Map<const Vector> db(v.data() + off, biases_[l].size());
    off += int(biases_[l].size());

    Matrix z = (w * a).colwise() + biases_[l];
    Matrix dz = (dw_t.transpose() * a + w * da).colwise() + db;
    if (l + 1 < weights_.size()) {
      Matrix t = z.array().tanh().matrix();
      da = ((1.0 - t.array().square()) * dz.array()).matrix();
      a = t;
    } else {
      a = z;
      da = dz;
    }
  }
  return da;
}

Vector Mlp::flat_params() const {
  Vector flat(num_params_);
  int off = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    // Row-major per the checkpoint contract.
    Eigen::Map<Matrix>(flat.data() + off, weights_[l].cols(), weights_[l].rows()) =
        weights_[l].transpose();
    off += int(weights_[l].size());
    flat.segment(off, biases_[l].size()) = biases_[l];
    off += int(biases_[l].size());
  }
  return flat;
}

void Mlp::set_flat_params(const Vector& flat) {
  if (flat.size() != num_params_) throw ShapeMismatch("flat parameter length mismatch");
  int off = 0;
  for (size_t l = 0; l < weights_.size(); ++l) {
    weights_[l] = Eigen::Map<const Matrix>(flat.data() + off, weights_[l].cols(),
                                           weights_[l].rows())
                      .transpose();
    off += int(weights_[l].size());
    biases_[l] = flat.segment(off, biases_[l].size());
    off += int(biases_[l].size());
  }
}

void adam_step(Vector& params, const Vector& grad, AdamState& state, const AdamConfig& cfg) {
  if (params.size() != grad.size()) throw ShapeMismatch("adam: param/grad size mismatch");
  if (state.m.size() != params.size()) {
    state.m = Vector::Zero(params.size());
    state.v = Vector::Zero(params.size());
    state.step = 0;
  }
  state.step += 1;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v.array().matrix() + (1.0 - cfg.beta2) * grad.array().square().matrix();
  const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.step));
  Vector m_hat = state.m / bc1;
  Vector v_hat = state.v / bc2;
  params -= cfg.lr * (m_hat.array() / (v_hat.array().sqrt() + cfg.eps)).matrix();
}

double clamp_log_std(double v) {
  return std::min(DiagGaussian::kLogStdMax, std::max(DiagGaussian::kLogStdMin, v));
}

DiagGaussian::DiagGaussian(Vector mean_, Vector log_std_)
    : mean(std::move(mean_)), log_std(std::move(log_std_)) {
  if (mean.size() != log_std.size()) throw ShapeMismatch("mean/log_std size mismatch");
  for (long i = 0; i < log_std.size(); ++i) log_std[i] = clamp_log_std(log_std[i]);
}

double gaussian_logprob(const DiagGaussian& d, const Vector& x) {
  if (x.size() != d.dim()) throw ShapeMismatch("logprob input size mismatch");
  constexpr double kLog2Pi = 1.8378770664093453;
  const Eigen::ArrayXd std = d.log_std.array().exp();
  const Eigen::ArrayXd z = (x.array() - d.mean.array()) / std;
  return -0.5 * (z.square().sum() + d.dim() * kLog2Pi) - d.log_std.sum();
}

Vector gaussian_sample(const DiagGaussian& d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector out(d.dim());
  for (long i = 0; i < out.size(); ++i) {
    out[i] = d.mean[i] + std::exp(d.log_std[i]) * normal(rng);
  }
  return out;
}

double kl_diag_gaussians(const DiagGaussian& p, const DiagGaussian& q) {
  if (p.dim() != q.dim()) throw ShapeMismatch("KL dimension mismatch");
  const Eigen::ArrayXd var_p = (2.0 * p.log_std.array()).exp();
  const Eigen::ArrayXd var_q = (2.0 * q.log_std.array()).exp();
  const Eigen::ArrayXd mean_diff = q.mean.array() - p.mean.array();
  double kl = (q.log_std.array() - p.log_std.array() +
               (var_p + mean_diff.square()) / (2.0 * var_q) - 0.5)
                  .sum();
  return std::max(0.0, kl);
}

}  // namespace gaitforge::nn
