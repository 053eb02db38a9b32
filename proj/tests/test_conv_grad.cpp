#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cinediff/rng.hpp"
#include "conv_net.hpp"

using namespace cinediff;
using detail::ConvNet;
using detail::ConvLayerSpec;

namespace {

// scalar objective: L = 0.5 * sum(out^2), so dL/dout = out
template <typename Net>
double objective(Net& net, const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>& input,
                 int nx, int ny) {
  const auto& out = net.forward(input, nx, ny);
  return 0.5 * out.array().square().sum();
}

}  // namespace

TEST_CASE("backward gradients match finite differences", "[conv-grad]") {
  const int nx = 5, ny = 4;
  const std::vector<ConvLayerSpec> specs = {{2, 3, 3, 1}, {3, 3, 3, 2}, {3, 2, 3, 1}};
  ConvNet<double> net(specs, 0.1, 17);

  Rng rng(55);
  Eigen::MatrixXd input(2, nx * ny);
  for (Eigen::Index i = 0; i < input.size(); ++i) {
    input.data()[i] = rng.gaussian() * 0.5;
  }

  // analytic gradients
  net.zero_grad();
  const auto& out = net.forward(input, nx, ny);
  Eigen::MatrixXd dout = out;
  const Eigen::MatrixXd dinput = net.backward(dout);

  std::vector<double> analytic;
  net.visit_params([&](double* /*p*/, double* g, std::size_t n) {
    analytic.insert(analytic.end(), g, g + n);
  });

  const double h = 1e-6;

  SECTION("parameter gradients") {
    std::size_t checked = 0, offset = 0;
    net.visit_params([&](double* p, double* /*g*/, std::size_t n) {
      // probe a spread of parameters in each chunk, not just the first
      for (std::size_t k = 0; k < n; k += std::max<std::size_t>(1, n / 7)) {
        const double saved = p[k];
        p[k] = saved + h;
        const double up = objective(net, input, nx, ny);
        p[k] = saved - h;
        const double down = objective(net, input, nx, ny);
        p[k] = saved;
        const double numeric = (up - down) / (2.0 * h);
        REQUIRE_THAT(analytic[offset + k],
                     Catch::Matchers::WithinAbs(numeric, 1e-5) ||
                         Catch::Matchers::WithinRel(numeric, 1e-5));
        ++checked;
      }
      offset += n;
    });
    REQUIRE(checked >= 20);
  }

  SECTION("input gradients") {
    for (Eigen::Index i = 0; i < input.size(); i += 3) {
      const double saved = input.data()[i];
      input.data()[i] = saved + h;
      const double up = objective(net, input, nx, ny);
      input.data()[i] = saved - h;
      const double down = objective(net, input, nx, ny);
      input.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      REQUIRE_THAT(dinput.data()[i], Catch::Matchers::WithinAbs(numeric, 1e-5) ||
                                         Catch::Matchers::WithinRel(numeric, 1e-5));
    }
  }
}

TEST_CASE("gradients accumulate until zeroed", "[conv-grad]") {
  const std::vector<ConvLayerSpec> specs = {{1, 2, 3, 1}, {2, 1, 3, 1}};
  ConvNet<double> net(specs, 0.1, 3);

  Eigen::MatrixXd input = Eigen::MatrixXd::Constant(1, 12, 0.3);
  net.zero_grad();
  const auto& out = net.forward(input, 4, 3);
  Eigen::MatrixXd dout = Eigen::MatrixXd::Ones(out.rows(), out.cols());
  net.backward(dout);

  std::vector<double> once;
  net.visit_params([&](double*, double* g, std::size_t n) {
    once.insert(once.end(), g, g + n);
  });

  net.forward(input, 4, 3);
  net.backward(dout);
  std::size_t offset = 0;
  net.visit_params([&](double*, double* g, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      REQUIRE_THAT(g[k], Catch::Matchers::WithinAbs(2.0 * once[offset + k], 1e-12));
    }
    offset += n;
  });

  net.zero_grad();
  net.visit_params([&](double*, double* g, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) REQUIRE(g[k] == 0.0);
  });
}

TEST_CASE("zeroed last layer silences the output", "[conv-grad]") {
  const std::vector<ConvLayerSpec> specs = {{2, 4, 3, 1}, {4, 2, 3, 1}};
  ConvNet<double> net(specs, 0.1, 8);
  net.zero_last_layer();

  Rng rng(21);
  Eigen::MatrixXd input(2, 20);
  for (Eigen::Index i = 0; i < input.size(); ++i) input.data()[i] = rng.gaussian();
  const auto& out = net.forward(input, 5, 4);
  REQUIRE(out.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("serialization round-trips parameters exactly", "[conv-grad]") {
  const std::vector<ConvLayerSpec> specs = {{2, 3, 3, 2}, {3, 2, 3, 1}};
  ConvNet<float> net(specs, 0.1f, 31);
  const std::vector<float> blob = net.serialize();
  REQUIRE(blob.size() == net.n_params());

  ConvNet<float> other(specs, 0.1f, 32);
  REQUIRE(other.serialize() != blob);  // different init seed
  other.deserialize(blob);
  REQUIRE(other.serialize() == blob);

  SECTION("wrong blob size is rejected") {
    std::vector<float> bad(blob.size() - 1);
    REQUIRE_THROWS_AS(other.deserialize(bad), Error);
  }
}
