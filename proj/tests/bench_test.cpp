#include "fkf/bench.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "fkf/errors.hpp"

namespace fkf {
namespace {

RunConfig small_config(StateSpaceModel model, int runs = 20) {
  RunConfig c;
  c.model = std::move(model);
  c.runs = runs;
  c.horizon = 50;
  c.base_seed = 3;
  c.timing = false;
  return c;
}

TEST(MonteCarlo, FiltersAgreeOnExample1) {
  const MonteCarloReport r = monte_carlo(small_config(example1()));
  ASSERT_EQ(r.outcomes.size(), 5U);
  const ErrorReport& ref = r.outcome(FilterKind::kf).errors;
  EXPECT_FALSE(ref.failed());
  EXPECT_FALSE(ref.mre_percent[2].has_value());
  for (const FilterOutcome& o : r.outcomes) {
    EXPECT_LE((o.errors.rmse - ref.rmse).norm(), 1e-8 * ref.rmse.norm()) << to_string(o.filter);
    for (std::size_t i = 0; i < ref.mre_percent.size(); ++i) {
      ASSERT_EQ(o.errors.mre_percent[i].has_value(), ref.mre_percent[i].has_value());
      if (ref.mre_percent[i]) EXPECT_NEAR(*o.errors.mre_percent[i], *ref.mre_percent[i], 1e-8 * *ref.mre_percent[i]);
    }
  }
  EXPECT_EQ(r.outcome(FilterKind::svd_kf).dp_reciprocals, 0U);
  EXPECT_GT(r.outcome(FilterKind::svd_srkf).dp_reciprocals, 0U);
}

TEST(MonteCarlo, BitIdenticalAcrossThreadCounts) {
  RunConfig a = small_config(example1(), 13);
  RunConfig b = a;
  b.threads = 3;
  const MonteCarloReport ra = monte_carlo(a);
  const MonteCarloReport rb = monte_carlo(b);
  for (std::size_t f = 0; f < ra.outcomes.size(); ++f) {
    EXPECT_EQ(ra.outcomes[f].errors.rmse, rb.outcomes[f].errors.rmse);
    EXPECT_EQ(ra.outcomes[f].errors.mre_percent, rb.outcomes[f].errors.mre_percent);
  }
}

TEST(MonteCarlo, NoiselessModelWithExactPriorHasZeroError) {
  StateSpaceModel m = example1();
  m.theta.setZero();
  m.pi0.setZero();
  m.x0_mean = Eigen::Vector4d(1, 0.5, 0.1, -0.2);
  RunConfig c = small_config(m, 1);
  c.filters = {FilterKind::kf, FilterKind::srkf, FilterKind::udkf, FilterKind::svd_kf};
  const MonteCarloReport r = monte_carlo(c);
  for (const FilterOutcome& o : r.outcomes) {
    EXPECT_FALSE(o.errors.failed()) << to_string(o.filter);
    EXPECT_TRUE(o.errors.rmse.isZero()) << to_string(o.filter);
  }
}

TEST(MonteCarlo, TimingIsReportedWhenRequested) {
  RunConfig c = small_config(example1(), 3);
  c.timing = true;
  c.filters = {FilterKind::kf};
  EXPECT_GT(monte_carlo(c).outcomes[0].mean_seconds, 0.0);
}

TEST(MonteCarlo, InvalidConfig) {
  RunConfig c = small_config(example1());
  c.runs = 0;
  EXPECT_THROW(monte_carlo(c), Error);
  c = small_config(example1());
  c.filters.clear();
  EXPECT_THROW(monte_carlo(c), Error);
  EXPECT_THROW(MonteCarloReport().outcome(FilterKind::kf), Error);
}

TEST(Classify, FailureCauses) {
  ErrorReport r;
  r.rmse_norm = 0.1;
  EXPECT_EQ(classify(r), CellClass::finite);
  r.rmse_norm = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(classify(r), CellClass::nan);
  r.failure = Failure{FailureCause::inf, 3};
  EXPECT_EQ(classify(r), CellClass::inf);
  r.failure = Failure{FailureCause::diagonal_inversion_underflow, 3};
  EXPECT_EQ(classify(r), CellClass::inf);
  r.failure = Failure{FailureCause::singular_innovation_cov, 3};
  EXPECT_EQ(classify(r), CellClass::nan);
  r.failure = Failure{FailureCause::factorization_failure, 3};
  EXPECT_EQ(classify(r), CellClass::fail);
  EXPECT_EQ(to_string(CellClass::fail), "FAIL");
}

TEST(Sweep, DefaultGridHasFourteenDecades) {
  const std::vector<double> d = default_deltas();
  ASSERT_EQ(d.size(), 14U);
  EXPECT_EQ(d.front(), 1e-1);
  EXPECT_EQ(d.back(), 1e-14);
}

TEST(Sweep, WellAndIllConditionedColumns) {
  RunConfig c = small_config(example1(), 10);
  const std::vector<double> deltas{1e-1, 1e-8};
  const SweepReport r = sweep(deltas, c);
  ASSERT_EQ(r.cells.size(), 5U);
  const double ref = r.cell(FilterKind::kf, 0).rmse_norm;
  for (FilterKind kind : kAllFilters) {
    EXPECT_EQ(r.cell(kind, 0).cell, CellClass::finite);
    EXPECT_NEAR(r.cell(kind, 0).rmse_norm, ref, 1e-8 * ref);
  }
  EXPECT_EQ(r.cell(FilterKind::kf, 1).cell, CellClass::nan);
  for (FilterKind kind : {FilterKind::srkf, FilterKind::udkf, FilterKind::svd_kf}) {
    EXPECT_EQ(r.cell(kind, 1).cell, CellClass::finite) << to_string(kind);
  }
}

}  // namespace
}  // namespace fkf
