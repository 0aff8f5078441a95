#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "gaitforge/checkpoint.hpp"
#include "gaitforge/nncore.hpp"
#include "gaitforge/sha256.hpp"

using namespace gaitforge;
using nn::Matrix;
using nn::Vector;

namespace {

Vector random_vector(long n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (long i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

// Central finite-difference gradient of loss(theta) = r . f(x; theta).
Vector fd_gradient(nn::Mlp& net, const Vector& x, const Vector& r, double eps = 1e-5) {
  Vector theta = net.flat_params();
  Vector grad(theta.size());
  for (long i = 0; i < theta.size(); ++i) {
    Vector tp = theta, tm = theta;
    tp[i] += eps;
    tm[i] -= eps;
    net.set_flat_params(tp);
    const double fp = r.dot(net.forward1(x));
    net.set_flat_params(tm);
    const double fm = r.dot(net.forward1(x));
    grad[i] = (fp - fm) / (2.0 * eps);
  }
  net.set_flat_params(theta);
  return grad;
}

void check_gradient(std::vector<int> sizes, uint64_t seed) {
  nn::Mlp net(sizes);
  net.init(seed, 1.0, 0.5);
  std::mt19937_64 rng(seed + 1);
  const Vector x = random_vector(sizes.front(), rng);
  const Vector r = random_vector(sizes.back(), rng);

  nn::Mlp::Cache cache;
  net.forward(Matrix(x), cache);
  const Vector analytic = net.backward(cache, Matrix(r));
  const Vector numeric = fd_gradient(net, x, r);
  const double denom = std::max(1.0, numeric.cwiseAbs().maxCoeff());
  CHECK((analytic - numeric).cwiseAbs().maxCoeff() / denom < 1e-6);
}

}  // namespace

TEST_CASE("forward of a zero net returns the output bias") {
  nn::Mlp net({3, 4, 2});
  Vector params = Vector::Zero(net.num_params());
  params[net.num_params() - 2] = 0.7;
  params[net.num_params() - 1] = -0.3;
  net.set_flat_params(params);
  const Vector y = net.forward1(Vector::Constant(3, 5.0));
  CHECK(y[0] == doctest::Approx(0.7));
  CHECK(y[1] == doctest::Approx(-0.3));
}

TEST_CASE("single linear layer with identity weights is the identity map") {
  nn::Mlp net({3, 3});
  Vector params = Vector::Zero(net.num_params());
  // Row-major W = I.
  for (int i = 0; i < 3; ++i) params[i * 3 + i] = 1.0;
  net.set_flat_params(params);
  Vector x(3);
  x << -1.5, 0.25, 3.0;
  CHECK((net.forward1(x) - x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("forward matches an independent matrix-arithmetic oracle") {
  nn::Mlp net({4, 6, 3});
  net.init(99, 1.0, 1.0);
  std::mt19937_64 rng(5);
  const Vector x = random_vector(4, rng);

  // Rebuild the computation by hand from the flat layout.
  const Vector flat = net.flat_params();
  Matrix w0(6, 4), w1(3, 6);
  Vector b0(6), b1(3);
  long off = 0;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 4; ++c) w0(r, c) = flat[off++];
  for (int r = 0; r < 6; ++r) b0[r] = flat[off++];
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 6; ++c) w1(r, c) = flat[off++];
  for (int r = 0; r < 3; ++r) b1[r] = flat[off++];

  const Vector hidden = (w0 * x + b0).array().tanh();
  const Vector expected = w1 * hidden + b1;
  CHECK((net.forward1(x) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("backward matches central finite differences for all repo architectures") {
  check_gradient({18, 64, 64, 6}, 21);   // policy
  check_gradient({18, 64, 64, 1}, 22);   // value
  check_gradient({13, 64, 64, 64}, 23);  // encoder (mean + log-std heads)
  check_gradient({32, 64, 64, 1}, 24);   // discriminator
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
  nn::Mlp net({5, 8, 2});
  net.init(3);
  nn::Mlp::Cache cache;
  std::mt19937_64 rng(4);
  net.forward(Matrix(random_vector(5, rng)), cache);
  CHECK(net.backward(cache, Matrix::Zero(2, 1)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear net with quadratic loss matches the analytic gradient") {
  nn::Mlp net({3, 2});
  net.init(11);
  std::mt19937_64 rng(12);
  const Vector x = random_vector(3, rng);
  const Vector target = random_vector(2, rng);

  nn::Mlp::Cache cache;
  const Matrix y = net.forward(Matrix(x), cache);
  const Vector err = y.col(0) - target;
  // d/dW of |Wx + b - t|^2 = 2 err x^T, d/db = 2 err.
  const Vector grad = net.backward(cache, Matrix(2.0 * err));
  long off = 0;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) {
      CHECK(grad[off++] == doctest::Approx(2.0 * err[r] * x[c]).epsilon(1e-12));
    }
  }
  for (int r = 0; r < 2; ++r) CHECK(grad[off++] == doctest::Approx(2.0 * err[r]).epsilon(1e-12));
}

TEST_CASE("jvp_params matches directional finite differences") {
  nn::Mlp net({4, 8, 3});
  net.init(31, 1.0, 0.7);
  std::mt19937_64 rng(32);
  const Vector x = random_vector(4, rng);
  const Vector v = random_vector(net.num_params(), rng);

  const Vector theta = net.flat_params();
  const double eps = 1e-6;
  net.set_flat_params(theta + eps * v);
  const Vector fp = net.forward1(x);
  net.set_flat_params(theta - eps * v);
  const Vector fm = net.forward1(x);
  net.set_flat_params(theta);

  const Matrix jvp = net.jvp_params(Matrix(x), v);
  CHECK((jvp.col(0) - (fp - fm) / (2.0 * eps)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("adam with zero gradient leaves parameters unchanged") {
  Vector params = Vector::Constant(5, 1.5);
  const Vector before = params;
  nn::AdamState state;
  nn::adam_step(params, Vector::Zero(5), state, {});
  CHECK(state.step == 1);
  CHECK((params - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("adam first step matches the closed form") {
  nn::AdamConfig cfg;
  Vector params = Vector::Zero(3);
  Vector grad(3);
  grad << 0.5, -2.0, 1e-12;
  nn::AdamState state;
  nn::adam_step(params, grad, state, cfg);
  for (int i = 0; i < 3; ++i) {
    const double expected = -cfg.lr * grad[i] / (std::abs(grad[i]) + cfg.eps);
    CHECK(params[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("adam two steps match a hand-unrolled recurrence") {
  nn::AdamConfig cfg;
  const double g = 0.3;
  Vector params = Vector::Zero(1);
  nn::AdamState state;
  nn::adam_step(params, Vector::Constant(1, g), state, cfg);
  nn::adam_step(params, Vector::Constant(1, g), state, cfg);

  double m = 0, v = 0, p = 0;
  for (int t = 1; t <= 2; ++t) {
    m = cfg.beta1 * m + (1 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1 - cfg.beta2) * g * g;
    const double mh = m / (1 - std::pow(cfg.beta1, t));
    const double vh = v / (1 - std::pow(cfg.beta2, t));
    p -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
  }
  CHECK(params[0] == doctest::Approx(p).epsilon(1e-14));
}

TEST_CASE("gaussian KL identities") {
  Vector zero = Vector::Zero(1), one = Vector::Constant(1, 1.0);
  nn::DiagGaussian std_normal(zero, zero);
  nn::DiagGaussian shifted(one, zero);
  CHECK(nn::kl_diag_gaussians(std_normal, std_normal) == doctest::Approx(0.0));
  CHECK(nn::kl_diag_gaussians(std_normal, shifted) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("gaussian logprob at the mean of a standard normal") {
  const int k = 7;
  nn::DiagGaussian d(Vector::Zero(k), Vector::Zero(k));
  CHECK(nn::gaussian_logprob(d, Vector::Zero(k)) ==
        doctest::Approx(-0.5 * k * std::log(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("KL is non-negative and zero only at identical distributions") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector m1 = random_vector(4, rng), m2 = random_vector(4, rng);
    const Vector s1 = random_vector(4, rng, 0.5), s2 = random_vector(4, rng, 0.5);
    nn::DiagGaussian p(m1, s1), q(m2, s2);
    const double kl = nn::kl_diag_gaussians(p, q);
    CHECK(kl >= 0.0);
    CHECK(nn::kl_diag_gaussians(p, p) < 1e-12);
    if (kl < 1e-12) {
      CHECK((m1 - m2).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
}

TEST_CASE("sampling is reproducible under a fixed seed") {
  nn::DiagGaussian d(Vector::Zero(6), Vector::Constant(6, -0.5));
  std::mt19937_64 a(123), b(123);
  for (int i = 0; i < 10; ++i) {
    CHECK((nn::gaussian_sample(d, a) - nn::gaussian_sample(d, b)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("log-std is clamped to [-5, 2]") {
  Vector mean = Vector::Zero(2);
  Vector wild(2);
  wild << -20.0, 9.0;
  nn::DiagGaussian d(mean, wild);
  CHECK(d.log_std[0] == -5.0);
  CHECK(d.log_std[1] == 2.0);
}

TEST_CASE("checkpoint round-trips parameters bit-exactly") {
  namespace fs = std::filesystem;
  const std::string stem = (fs::temp_directory_path() / "gaitforge_ckpt_test").string();
  nn::Mlp net({5, 16, 4});
  net.init(2024);
  const Vector params = net.flat_params();
  nn::save_checkpoint(stem, net.layer_sizes(), params, 2024);
  const nn::Checkpoint back = nn::load_checkpoint(stem);
  CHECK(back.layer_sizes == net.layer_sizes());
  CHECK(back.seed == 2024);
  REQUIRE(back.params.size() == params.size());
  CHECK((back.params - params).cwiseAbs().maxCoeff() == 0.0);
  CHECK(nn::params_hash(params) == nn::params_hash(back.params));
  fs::remove(stem + ".json");
  fs::remove(stem + ".f64");
}

TEST_CASE("params_hash matches a known SHA-256 vector") {
  // SHA-256 of the empty string.
  CHECK(Sha256::of("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(Sha256::of("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
