#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaitforge::nn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct ShapeMismatch : std::runtime_error {
  explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

// Fully connected net: tanh hidden activations, identity output.
// Parameters flatten row-major as W0, b0, W1, b1, ... in declaration order.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> layer_sizes);

  // Orthogonal-style initialization: seeded Gaussian matrices orthogonalized
  // by QR, scaled by `gain` (`output_gain` on the last layer).
  void init(uint64_t seed, double gain = 1.0, double output_gain = 1.0);

  int input_dim() const { return layer_sizes_.front(); }
  int output_dim() const { return layer_sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  int num_params() const { return num_params_; }

  // Columns are samples.
  struct Cache {
    std::vector<Matrix> activations;  // a0 = x, a1..aL post-activation
    std::vector<Matrix> pre;          // z1..zL pre-activation
  };

  Matrix forward(const Matrix& x) const;
  Matrix forward(const Matrix& x, Cache& cache) const;
  Vector forward1(const Vector& x) const;

  // Reverse mode: parameter gradient (flat, summed over columns) for
  // upstream dL/dy. Returns dL/dx when `input_grad` given.
  Vector backward(const Cache& cache, const Matrix& upstream, Matrix* input_grad = nullptr) const;

  // Forward mode: directional derivative of outputs w.r.t. parameters along
  // flat direction v, evaluated at inputs x.
  Matrix jvp_params(const Matrix& x, const Vector& v) const;

  Vector flat_params() const;
  void set_flat_params(const Vector& flat);

 private:
  void check_input(const Matrix& x) const;

  std::vector<int> layer_sizes_;
  std::vector<Matrix> weights_;
  std::vector<Vector> biases_;
  int num_params_ = 0;
};

// Adam with bias correction; state owned by the caller.
struct AdamState {
  Vector m;
  Vector v;
  long step = 0;
};

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

void adam_step(Vector& params, const Vector& grad, AdamState& state, const AdamConfig& cfg);

// Diagonal Gaussian with log-std clamped to [-5, 2].
struct DiagGaussian {
  Vector mean;
  Vector log_std;

  static constexpr double kLogStdMin = -5.0;
  static constexpr double kLogStdMax = 2.0;

  DiagGaussian() = default;
  DiagGaussian(Vector mean_, Vector log_std_);

  int dim() const { return int(mean.size()); }
  Vector stddev() const { return log_std.array().exp().matrix(); }
};

double gaussian_logprob(const DiagGaussian& d, const Vector& x);
Vector gaussian_sample(const DiagGaussian& d, std::mt19937_64& rng);
double kl_diag_gaussians(const DiagGaussian& p, const DiagGaussian& q);

double clamp_log_std(double v);

}  // namespace gaitforge::nn
