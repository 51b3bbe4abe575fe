#include <gtest/gtest.h>

#include <json.hpp>

#include "ilb/errors.hpp"
#include "ilb/net/leaky_relu_net.hpp"
#include "ilb/net/maxout_net.hpp"
#include "ilb/net/serialization.hpp"
#include "ilb/net/sgd.hpp"
#include "support.hpp"

using namespace ilb;

namespace {

AffineLayer affine(DenseMatrix w, Vector b) { return {std::move(w), std::move(b)}; }

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(LeakyRelu, IdentityLayerKeepsNonNegativeInput) {
  LeakyReluNet net(3, {affine(DenseMatrix::Identity(3, 3), Vector::Zero(3))}, 0.2);
  const Vector z = vec({0.0, 1.5, 3.0});
  EXPECT_EQ(net.forward(z), z);
}

TEST(LeakyRelu, ScalarSlope) {
  // Two scalar layers so the activation sits between them.
  DenseMatrix one = DenseMatrix::Identity(1, 1);
  LeakyReluNet net(1, {affine(one, Vector::Zero(1)), affine(one, Vector::Zero(1))}, 0.2);
  EXPECT_DOUBLE_EQ(net.forward(vec({-1.0}))(0), -0.2);
  EXPECT_DOUBLE_EQ(net.inverse(vec({-0.2}))(0), -1.0);
  EXPECT_DOUBLE_EQ(leaky_relu(-1.0, 0.2), -0.2);
  EXPECT_DOUBLE_EQ(leaky_relu_inverse(-0.2, 0.2), -1.0);
}

TEST(LeakyRelu, MatchesScalarOracle) {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const auto net = LeakyReluNet::random(5, 2, 0.2, rng);
    const Vector z = random_normal(5, 1.0, rng);
    EXPECT_LT(test::max_abs_diff(test::scalar_leaky_forward(net, test::to_std(z)), net.forward(z)), 1e-12);
  }
}

TEST(LeakyRelu, RoundTrip) {
  Rng rng(3);
  const auto net = LeakyReluNet::random(5, 2, 0.2, rng);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vector z = random_normal(5, 1.0, rng);
    worst = std::max(worst, (net.inverse(net.forward(z)) - z).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(LeakyRelu, IdentityNetwork) {
  const auto net = LeakyReluNet::identity(4);
  const Vector x = vec({-1.0, 2.0, -3.0, 0.5});
  EXPECT_EQ(net.forward(x), x);
  EXPECT_EQ(net.inverse(x), x);
  EXPECT_EQ(net.log_abs_det_inverse_jacobian(x), 0.0);
}

TEST(LeakyRelu, RejectsBadShapesAndSingularLayers) {
  EXPECT_THROW(LeakyReluNet(2, {affine(DenseMatrix::Identity(3, 3), Vector::Zero(3))}, 0.2), ConfigError);
  EXPECT_THROW(LeakyReluNet::identity(2, 1.0), ConfigError);
  EXPECT_THROW(LeakyReluNet(2, {affine(DenseMatrix::Zero(2, 2), Vector::Zero(2))}, 0.2), SingularityError);
  const auto net = LeakyReluNet::identity(2);
  EXPECT_THROW(net.forward(Vector::Zero(3)), ConfigError);
}

TEST(LeakyRelu, LogDetMatchesFiniteDifferenceJacobian) {
  Rng rng(5);
  const auto net = LeakyReluNet::random(3, 3, 0.3, rng);
  const Vector x = net.forward(random_normal(3, 1.0, rng));
  DenseMatrix jac(3, 3);
  const double h = 1e-6;
  for (int j = 0; j < 3; ++j) {
    Vector xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    jac.col(j) = (net.inverse(xp) - net.inverse(xm)) / (2 * h);
  }
  EXPECT_NEAR(net.log_abs_det_inverse_jacobian(x), std::log(std::abs(jac.determinant())), 1e-5);
}

TEST(LeakyRelu, GradientsMatchFiniteDifferences) {
  Rng rng(21);
  for (int rep = 0; rep < 10; ++rep) {
    auto net = LeakyReluNet::random(5, 3, 0.2, rng);
    const auto g = test::check_gradients(net, random_normal(5, 1.0, rng), random_normal(5, 1.0, rng));
    EXPECT_LT(g.worst, 1e-4);
    EXPECT_GT(g.checked, 0);
  }
}

TEST(LeakyRelu, ZeroOutputGradientGivesZeroTape) {
  Rng rng(2);
  const auto net = LeakyReluNet::random(4, 2, 0.2, rng);
  LeakyReluNet::Cache cache;
  net.forward(random_normal(4, 1.0, rng), cache);
  EXPECT_TRUE(net.backward(cache, Vector::Zero(4)).is_zero());
}

TEST(LeakyRelu, StaleCacheIsRejected) {
  Rng rng(2);
  auto net = LeakyReluNet::random(3, 2, 0.2, rng);
  LeakyReluNet::Cache cache;
  std::as_const(net).forward(random_normal(3, 1.0, rng), cache);
  net.parameter_blocks()[0][0] += 0.1;
  EXPECT_THROW(net.backward(cache, Vector::Ones(3)), ContractError);
  const auto other = LeakyReluNet::random(3, 2, 0.2, rng);
  EXPECT_THROW(other.backward(cache, Vector::Ones(3)), ContractError);
}

TEST(LeakyRelu, MutationRefreshesInverse) {
  Rng rng(8);
  auto net = LeakyReluNet::random(3, 2, 0.2, rng);
  net.parameter_blocks()[0][0] += 0.5;
  const Vector z = random_normal(3, 1.0, rng);
  EXPECT_LT((net.inverse(net.forward(z)) - z).norm(), 1e-9);
}

TEST(Maxout, EqualPiecesActAsOneAffineLayer) {
  Rng rng(4);
  const DenseMatrix w = random_normal(3, 3, 1.0, rng);
  const Vector b = random_normal(3, 1.0, rng);
  MaxoutNet net({MaxoutLayer{{affine(w, b), affine(w, b)}}}, affine(DenseMatrix::Identity(3, 3), Vector::Zero(3)));
  const Vector x = random_normal(3, 1.0, rng);
  EXPECT_LT((net.forward(x) - (w * x + b)).norm(), 1e-14);
}

TEST(Maxout, PlusMinusPiecesGiveAbsoluteValue) {
  const DenseMatrix id = DenseMatrix::Identity(3, 3);
  MaxoutNet net({MaxoutLayer{{affine(id, Vector::Zero(3)), affine(-id, Vector::Zero(3))}}},
                affine(id, Vector::Zero(3)));
  const Vector x = vec({-1.5, 0.0, 2.0});
  EXPECT_EQ(net.forward(x), x.cwiseAbs());
}

TEST(Maxout, MatchesScalarOracle) {
  Rng rng(12);
  for (int rep = 0; rep < 20; ++rep) {
    const auto net = MaxoutNet::random(5, 7, 2, 3, 5, rng);
    // Nonzero biases so the oracle sees them too.
    auto copy = net;
    for (auto& block : copy.parameter_blocks())
      for (double& v : block) v += 0.01;
    const Vector x = random_normal(5, 1.0, rng);
    EXPECT_LT(test::max_abs_diff(test::scalar_maxout_forward(copy, test::to_std(x)), copy.forward(x)), 1e-12);
  }
}

TEST(Maxout, GradientsMatchFiniteDifferences) {
  Rng rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    auto net = MaxoutNet::random(5, 6, 2, 2, 5, rng);
    const auto g = test::check_gradients(net, random_normal(5, 1.0, rng), random_normal(5, 1.0, rng));
    EXPECT_LT(g.worst, 1e-4);
  }
}

TEST(Maxout, AffineNetInputGradientIsTransposeProduct) {
  Rng rng(6);
  const DenseMatrix w = random_normal(4, 3, 1.0, rng);
  MaxoutNet net({}, affine(w, Vector::Zero(4)));
  MaxoutNet::Cache cache;
  net.forward(random_normal(3, 1.0, rng), cache);
  const Vector g = random_normal(4, 1.0, rng);
  EXPECT_LT((net.backward(cache, g).input - w.transpose() * g).norm(), 1e-14);
}

TEST(Maxout, ContinuousAcrossKinks) {
  const DenseMatrix id = DenseMatrix::Identity(1, 1);
  MaxoutNet net({MaxoutLayer{{affine(id, Vector::Zero(1)), affine(-id, Vector::Zero(1))}}}, affine(id, Vector::Zero(1)));
  for (double eps : {1e-3, 1e-6, 1e-9}) EXPECT_NEAR(net.forward(vec({eps}))(0), net.forward(vec({-eps}))(0), 1e-12);
}

TEST(Maxout, ValidatesPieces) {
  const DenseMatrix id = DenseMatrix::Identity(2, 2);
  EXPECT_THROW(MaxoutNet({MaxoutLayer{{affine(id, Vector::Zero(2))}}}, affine(id, Vector::Zero(2))), ConfigError);
}

TEST(Maxout, PrecomposeInputMatchesExplicitTransform) {
  Rng rng(14);
  for (int hidden : {0, 2}) {
    auto net = MaxoutNet::random(4, 6, hidden, 2, 4, rng);
    const auto original = net;
    const DenseMatrix a = random_normal(4, 4, 1.0, rng);
    const Vector c = random_normal(4, 1.0, rng);
    net.precompose_input(a, c);
    const Vector x = random_normal(4, 1.0, rng);
    EXPECT_LT((net.forward(x) - original.forward(a * x + c)).norm(), 1e-12);
  }
}

TEST(Sgd, ZeroGradientLeavesParameters) {
  Vector p = Vector::Ones(3);
  SgdOptions o;
  o.l2 = 0.0;
  SgdMomentumState state(o, {as_span(std::as_const(p))});
  GradientTape tape;
  tape.blocks = {Vector::Zero(3)};
  sgd_step({as_span(p)}, tape, state);
  EXPECT_EQ(p, Vector::Ones(3));
}

TEST(Sgd, PlainStep) {
  Vector p = Vector::Zero(1);
  SgdOptions o{0.01, 0.0, 0.0, 0.1};
  SgdMomentumState state(o, {as_span(std::as_const(p))});
  GradientTape tape;
  tape.blocks = {Vector::Ones(1)};
  sgd_step({as_span(p)}, tape, state);
  EXPECT_NEAR(p(0), -0.01, 1e-15);
}

TEST(Sgd, MomentumSecondUpdate) {
  Vector p = Vector::Zero(1);
  SgdOptions o{0.01, 0.9, 0.0, 0.1};
  SgdMomentumState state(o, {as_span(std::as_const(p))});
  GradientTape tape;
  tape.blocks = {Vector::Ones(1)};
  sgd_step({as_span(p)}, tape, state);
  const double first = p(0);
  sgd_step({as_span(p)}, tape, state);
  EXPECT_NEAR(std::abs(p(0) - first), 0.019, 1e-15);
}

TEST(Sgd, L2PullsTowardZero) {
  Vector p = Vector::Constant(1, 2.0);
  SgdOptions o{0.1, 0.0, 0.5, 0.1};
  SgdMomentumState state(o, {as_span(std::as_const(p))});
  GradientTape tape;
  tape.blocks = {Vector::Zero(1)};
  sgd_step({as_span(p)}, tape, state);
  EXPECT_NEAR(p(0), 2.0 - 0.1 * 0.5 * 2.0, 1e-15);
}

TEST(Sgd, ExponentialDecaySchedule) {
  Vector p = Vector::Zero(1);
  SgdMomentumState state(SgdOptions{}, {as_span(std::as_const(p))});
  state.set_epoch(0, 100);
  EXPECT_DOUBLE_EQ(state.learning_rate(), 0.01);
  state.set_epoch(50, 100);
  EXPECT_NEAR(state.learning_rate(), 0.01 * std::pow(0.1, 0.5), 1e-15);
  state.set_epoch(100, 100);
  EXPECT_NEAR(state.learning_rate(), 0.001, 1e-15);
}

TEST(Sgd, DeterministicReplay) {
  auto run = [] {
    Rng rng(9);
    auto net = MaxoutNet::random(3, 4, 1, 2, 3, rng);
    SgdMomentumState state(SgdOptions{}, std::as_const(net).parameter_blocks());
    for (int s = 0; s < 50; ++s) {
      MaxoutNet::Cache cache;
      std::as_const(net).forward(random_normal(3, 1.0, rng), cache);
      auto tape = std::as_const(net).backward(cache, random_normal(3, 1.0, rng));
      sgd_step(net.parameter_blocks(), tape, state);
    }
    return test::to_std(net.forward(Vector::Ones(3)));
  };
  EXPECT_EQ(run(), run());
}

TEST(Serialization, LeakyRoundTripAndFieldNames) {
  Rng rng(1);
  const auto net = LeakyReluNet::random(3, 2, 0.25, rng);
  const std::string text = to_json(net);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_EQ(j.at("family"), "leaky_relu");
  EXPECT_EQ(j.at("alpha"), 0.25);
  ASSERT_EQ(j.at("layers").size(), 2u);
  EXPECT_TRUE(j.at("layers")[0].contains("w"));
  EXPECT_TRUE(j.at("layers")[0].contains("b"));
  const auto back = leaky_relu_net_from_json(text);
  const Vector z = random_normal(3, 1.0, rng);
  EXPECT_EQ(back.forward(z), net.forward(z));
  EXPECT_THROW(maxout_net_from_json(text), ConfigError);
}

TEST(Serialization, MaxoutRoundTrip) {
  Rng rng(2);
  const auto net = MaxoutNet::random(4, 5, 2, 3, 4, rng);
  const std::string text = to_json(net);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j.at("family"), "maxout");
  EXPECT_EQ(j.at("pieces"), 3);
  EXPECT_EQ(j.at("layers").size(), 2u * 3u + 1u);
  const auto back = maxout_net_from_json(text);
  const Vector x = random_normal(4, 1.0, rng);
  EXPECT_EQ(back.forward(x), net.forward(x));
  EXPECT_THROW(maxout_net_from_json("{not json"), IoError);
}
