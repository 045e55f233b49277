#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fkf/filters.hpp"
#include "fkf/metrics.hpp"
#include "fkf/model.hpp"

namespace fkf {

struct RunConfig {
  StateSpaceModel model;
  std::vector<FilterKind> filters{std::begin(kAllFilters), std::end(kAllFilters)};
  int runs = 500;
  int horizon = 100;
  std::uint64_t base_seed = 1;
  bool timing = true;
  // Where the simulated trajectories start. The filters always start from
  // x0_mean with covariance pi0.
  InitialState initial_state = InitialState::mean;
  int threads = 1;  // 0 picks the hardware concurrency
  FilterOptions filter_options;

  void validate() const;
};

struct FilterOutcome {
  FilterKind filter;
  ErrorReport errors;
  double mean_seconds = 0.0;          // per complete filter pass; 0 when timing is off
  std::uint64_t dp_reciprocals = 0;   // summed over runs
  int failed_runs = 0;
};

struct MonteCarloReport {
  std::vector<FilterOutcome> outcomes;  // in RunConfig::filters order
  int runs = 0;
  int horizon = 0;

  const FilterOutcome& outcome(FilterKind kind) const;
};

/// Every run j simulates one trajectory with seed stream_seed(base_seed, j)
/// and passes that same trajectory to every selected filter. Results are
/// bit-identical for identical configs regardless of the thread count.
MonteCarloReport monte_carlo(const RunConfig& config);

enum class CellClass { finite, nan, inf, fail };

/// "finite", "NaN", "Inf", "FAIL".
std::string_view to_string(CellClass cell) noexcept;

CellClass classify(const ErrorReport& report);

struct SweepCell {
  CellClass cell = CellClass::finite;
  double rmse_norm = 0.0;
  std::optional<Failure> failure;
};

struct SweepReport {
  std::vector<double> deltas;
  std::vector<FilterKind> filters;
  std::vector<std::vector<SweepCell>> cells;  // cells[filter][delta]
  std::vector<double> mean_seconds;           // per filter, averaged over deltas

  const SweepCell& cell(FilterKind kind, std::size_t delta_index) const;
};

/// Runs monte_carlo on example2(delta) for every delta; config.model is ignored.
SweepReport sweep(std::span<const double> deltas, const RunConfig& config);

/// 1e-1, 1e-2, ..., 1e-14.
std::vector<double> default_deltas();

}  // namespace fkf
