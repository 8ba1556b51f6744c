#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pursuit/dense_network.hpp"

using namespace pursuit;
using Net = DenseNetwork<double>;

TEST_CASE("zero weights give zero output") {
  Net actor({4, 5, 1}, OutputActivation::Tanh);
  CHECK(actor.forward(Net::Matrix::Constant(4, 3, 0.7)).isZero());
  Net critic({5, 6, 6, 1}, OutputActivation::Linear);
  CHECK(critic.forward(Net::Matrix::Random(5, 2)).isZero());
}

TEST_CASE("linear network matches the hand-composed affine map") {
  Net net({3, 2, 1}, OutputActivation::Linear);
  net.set_hidden_linear(true);
  net.layers()[0].weight << 1, -2, 0.5, 3, 0, -1;
  net.layers()[0].bias << 0.25, -0.5;
  net.layers()[1].weight << 2, -1;
  net.layers()[1].bias << 0.1;
  const Eigen::Vector3d x(1.0, 2.0, -4.0);
  // h = (1 - 4 - 2 + 0.25, 3 + 4 - 0.5) = (-4.75, 6.5); y = 2h0 - h1 + 0.1
  CHECK(net.forward(x)(0, 0) == doctest::Approx(2 * -4.75 - 6.5 + 0.1));
}

TEST_CASE("rectifier and tanh activations") {
  Net net({1, 1, 1}, OutputActivation::Tanh);
  net.layers()[0].weight << 1;
  net.layers()[1].weight << 1;
  CHECK(net.forward(Net::Matrix::Constant(1, 1, -2.0))(0, 0) == 0.0);
  CHECK(net.forward(Net::Matrix::Constant(1, 1, 0.5))(0, 0) == doctest::Approx(std::tanh(0.5)));
}

TEST_CASE("backward matches central differences for parameters and inputs") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    Net net({4, 7, 5, 2}, trial % 2 ? OutputActivation::Tanh : OutputActivation::Linear);
    net.init_uniform_fan_in(rng);
    Net::Matrix x = Net::Matrix::Random(4, 5);
    const Net::Matrix w = Net::Matrix::Random(2, 5);
    auto loss = [&] { return net.forward(x).cwiseProduct(w).sum(); };

    Net::Cache cache;
    net.forward(x, cache);
    Net::Params grads;
    const Net::Matrix dx = net.backward(cache, w, grads);

    std::vector<double> analytic(net.parameter_count());
    for (std::size_t k = 0; k < analytic.size(); ++k) analytic[k] = Net::parameter_ref(grads, k);
    const auto numeric = oracle::central_differences(
        analytic.size(), [&](std::size_t k) -> double& { return net.parameter(k); }, loss);
    CHECK(oracle::relative_error(analytic, numeric) < 1e-6);

    std::vector<double> dx_a(dx.data(), dx.data() + dx.size());
    const auto dx_n = oracle::central_differences(
        static_cast<std::size_t>(x.size()), [&](std::size_t k) -> double& { return x.data()[k]; }, loss);
    CHECK(oracle::relative_error(dx_a, dx_n) < 1e-6);
  }
}

TEST_CASE("fan-in initialization bounds") {
  std::mt19937_64 rng(52);
  Net net({16, 64, 1}, OutputActivation::Linear);
  net.init_uniform_fan_in(rng);
  CHECK(net.layers()[0].weight.cwiseAbs().maxCoeff() <= 0.25);
  CHECK(net.layers()[1].weight.cwiseAbs().maxCoeff() <= 0.125);
  CHECK(net.layers()[0].weight.cwiseAbs().maxCoeff() > 0.2);
}

TEST_CASE("soft update is a convex combination") {
  std::mt19937_64 rng(53);
  Net a({3, 4, 1}, OutputActivation::Linear), b({3, 4, 1}, OutputActivation::Linear);
  a.init_uniform_fan_in(rng);
  b.init_uniform_fan_in(rng);
  const Net before = b;
  b.soft_update_from(a, 0.3);
  for (std::size_t k = 0; k < b.parameter_count(); ++k) {
    CHECK(b.parameter(k) == doctest::Approx(0.3 * a.parameter(k) + 0.7 * before.parameter(k)).epsilon(1e-15));
  }
  b.soft_update_from(a, 1.0);
  CHECK(b == a);
  Net other({3, 5, 1}, OutputActivation::Linear);
  CHECK_THROWS(b.soft_update_from(other, 0.5));
}

TEST_CASE("adam first step moves each parameter by about lr against its gradient") {
  Net net({2, 1}, OutputActivation::Linear);
  Adam<double> opt(net, 0.01);
  Net::Params g = net.zeros_like();
  g[0].weight << 3.0, -0.5;
  g[0].bias << 0.0;
  opt.step(net, g);
  CHECK(net.layers()[0].weight(0, 0) == doctest::Approx(-0.01));
  CHECK(net.layers()[0].weight(0, 1) == doctest::Approx(0.01));
  CHECK(net.layers()[0].bias(0) == 0.0);
  CHECK(opt.steps() == 1);
}

TEST_CASE("shape errors and casts") {
  Net net({3, 2}, OutputActivation::Tanh);
  CHECK_THROWS_AS(net.forward(Net::Matrix::Zero(4, 1)), std::invalid_argument);
  CHECK_THROWS_AS(Net({3}, OutputActivation::Linear), std::invalid_argument);
  std::mt19937_64 rng(54);
  net.init_uniform_fan_in(rng);
  const auto f = net.cast<float>();
  CHECK(f.parameter(0) == static_cast<float>(net.parameter(0)));
  CHECK_THROWS_AS(net.parameter(net.parameter_count()), std::out_of_range);
}
