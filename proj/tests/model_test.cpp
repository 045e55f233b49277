#include "fkf/model.hpp"

#include <gtest/gtest.h>

#include "fkf/errors.hpp"
#include "oracle.hpp"

namespace fkf {
namespace {

StateSpaceModel noiseless(const StateSpaceModel& base) {
  StateSpaceModel m = base;
  m.theta.setZero();
  m.r.setZero();
  m.pi0.setZero();
  m.x0_mean = Eigen::Vector4d(1.0, -0.5, 0.25, 2.0);
  return m;
}

TEST(Example1, MatchesPublishedMatrices) {
  const StateSpaceModel m = example1();
  EXPECT_EQ(m.f(3, 3), 0.606);
  EXPECT_EQ(m.f(0, 2), 0.5);
  EXPECT_EQ(m.theta(3, 3), 0.0063);
  EXPECT_EQ(m.theta.sum(), 0.0063);
  EXPECT_TRUE(m.pi0.isApprox(Eigen::Vector4d(1, 1, 1, 0.01).asDiagonal().toDenseMatrix()));
  EXPECT_EQ(m.h, (Eigen::MatrixXd(1, 4) << 1, 0, 0, 0).finished());
  EXPECT_EQ(m.r(0, 0), 1.0);
  EXPECT_TRUE(m.g.isIdentity());
  EXPECT_TRUE(m.b.isZero());
  EXPECT_NO_THROW(m.validate());
}

TEST(Example2, IllConditionedMeasurements) {
  EXPECT_DOUBLE_EQ(example2(0.1).h(1, 3), 1.1);
  const StateSpaceModel m = example2(1e-3);
  EXPECT_TRUE(m.r.isApprox(1e-6 * Eigen::Matrix2d::Identity()));
  EXPECT_TRUE(m.pi0.isIdentity());
  EXPECT_TRUE(m.x0_mean.isZero());
  EXPECT_EQ(example2(0.5).theta, example1().theta);
  EXPECT_EQ(example2(0.5).f, example1().f);
}

TEST(Example2, RejectsBadDelta) {
  for (double d : {0.0, -1e-3, 1.5}) {
    try {
      example2(d);
      FAIL() << "delta " << d;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::invalid_input);
    }
  }
}

TEST(Validate, RejectsInconsistentModels) {
  StateSpaceModel m = example1();
  m.h = Eigen::MatrixXd::Ones(1, 3);
  EXPECT_THROW(m.validate(), Error);

  m = example1();
  m.theta(3, 3) = -1.0;
  try {
    m.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_model);
  }

  m = example1();
  m.pi0(0, 1) = 0.3;
  EXPECT_THROW(m.validate(), Error);

  m = example1();
  m.set_override(0, ModelField::r, Eigen::MatrixXd::Identity(1, 1));
  EXPECT_THROW(m.validate(), Error);

  m = example1();
  m.set_override(2, ModelField::h, Eigen::MatrixXd::Ones(2, 4));
  EXPECT_THROW(m.validate(), Error);
}

TEST(Overrides, ReplaceOnlyTheirStep) {
  StateSpaceModel m = example1();
  m.set_override(3, ModelField::r, 4.0 * Eigen::MatrixXd::Identity(1, 1));
  EXPECT_TRUE(m.time_varying());
  EXPECT_EQ(m.at(3).r(0, 0), 4.0);
  EXPECT_EQ(m.at(2).r(0, 0), 1.0);
  EXPECT_EQ(&m.at(3).f, &m.f);
}

TEST(Simulate, NoiselessIsDeterministicRecursion) {
  const StateSpaceModel m = noiseless(example1());
  const Trajectory t = simulate(m, 20, Eigen::MatrixXd(), 5);
  Eigen::VectorXd x = m.x0_mean;
  for (int k = 0; k < 20; ++k) {
    x = m.f * x;
    EXPECT_LE((t.states.row(k).transpose() - x).norm(), 1e-12 * (1.0 + x.norm()));
    EXPECT_EQ(t.measurements(k, 0), (m.h * t.states.row(k).transpose())(0));
  }
}

TEST(Simulate, ControlsEnterThroughB) {
  StateSpaceModel m = noiseless(example1());
  m.b = Eigen::Vector4d(0, 0, 0, 1);
  const Eigen::MatrixXd u = Eigen::MatrixXd::Constant(3, 1, 2.0);
  const Trajectory t = simulate(m, 3, u, 5);
  const Eigen::VectorXd x1 = m.f * m.x0_mean + m.b * 2.0;
  EXPECT_LE((t.states.row(0).transpose() - x1).norm(), 1e-14);
  EXPECT_EQ(t.controls, u);
  EXPECT_THROW(simulate(m, 4, u, 5), Error);
}

TEST(Simulate, BitIdenticalForSameSeed) {
  const StateSpaceModel m = example1();
  const Trajectory a = simulate(m, 100, Eigen::MatrixXd(), 42);
  const Trajectory b = simulate(m, 100, Eigen::MatrixXd(), 42);
  const Trajectory c = simulate(m, 100, Eigen::MatrixXd(), 43);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.measurements, b.measurements);
  EXPECT_EQ(trajectory_digest(a), trajectory_digest(b));
  EXPECT_NE(trajectory_digest(a), trajectory_digest(c));
}

TEST(Simulate, Example1ThirdStateStaysAtZeroFromTheMean) {
  const Trajectory t =
      simulate(example1(), 100, Eigen::MatrixXd(), 3, {InitialState::mean});
  EXPECT_TRUE(t.states.col(2).isZero());
  EXPECT_FALSE(t.states.col(3).isZero());
}

TEST(Simulate, ProcessNoiseVariance) {
  StateSpaceModel m;
  m.f = Eigen::MatrixXd::Zero(2, 2);
  m.b = Eigen::MatrixXd::Zero(2, 0);
  m.g = Eigen::MatrixXd::Identity(2, 2);
  m.theta = Eigen::MatrixXd::Identity(2, 2);
  m.h = Eigen::MatrixXd::Identity(1, 2);
  m.r = Eigen::MatrixXd::Identity(1, 1);
  m.x0_mean = Eigen::VectorXd::Zero(2);
  m.pi0 = Eigen::MatrixXd::Identity(2, 2);
  const Trajectory t = simulate(m, 100000, Eigen::MatrixXd(), 9);
  for (Eigen::Index i = 0; i < 2; ++i) {
    const double mean = t.states.col(i).mean();
    const double var = (t.states.col(i).array() - mean).square().sum() / (t.states.rows() - 1);
    EXPECT_GE(var, 0.97);
    EXPECT_LE(var, 1.03);
  }
}

TEST(Simulate, InitialStateCovariance) {
  StateSpaceModel m = example1();
  m.f = Eigen::MatrixXd::Identity(4, 4);
  m.theta.setZero();
  m.pi0 = Eigen::MatrixXd::Identity(4, 4);
  const int draws = 100000;
  Eigen::MatrixXd x(draws, 4);
  for (int j = 0; j < draws; ++j) {
    x.row(j) = simulate(m, 1, Eigen::MatrixXd(), static_cast<std::uint64_t>(j)).states.row(0);
  }
  const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / (draws - 1);
  EXPECT_LE((cov - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(Simulate, RejectsBadArguments) {
  EXPECT_THROW(simulate(example1(), 0, Eigen::MatrixXd(), 1), Error);
  StateSpaceModel m = example1();
  m.pi0(0, 0) = -1;
  EXPECT_THROW(simulate(m, 5, Eigen::MatrixXd(), 1), Error);
}

}  // namespace
}  // namespace fkf
