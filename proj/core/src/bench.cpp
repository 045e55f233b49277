#include "fkf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "fkf/errors.hpp"
#include "fkf/rng.hpp"

namespace fkf {
namespace {

struct FilterRun {
  Eigen::MatrixXd estimates;  // K x n; NaN from the failure step on
  std::optional<Failure> failure;
  double seconds = 0.0;
  std::uint64_t dp_reciprocals = 0;
};

struct RunResult {
  Eigen::MatrixXd truth;
  std::vector<FilterRun> filters;
};

CellClass cell_of(FailureCause cause) {
  switch (cause) {
    case FailureCause::nan:
    case FailureCause::singular_innovation_cov: return CellClass::nan;
    case FailureCause::inf:
    case FailureCause::diagonal_inversion_underflow: return CellClass::inf;
    case FailureCause::factorization_failure: return CellClass::fail;
  }
  return CellClass::fail;
}

int precedence(CellClass cell) {
  switch (cell) {
    case CellClass::fail: return 3;
    case CellClass::inf: return 2;
    case CellClass::nan: return 1;
    case CellClass::finite: return 0;
  }
  return 0;
}

FilterRun run_filter(FilterKind kind, const FilterModel& model, const Trajectory& t,
                     bool timing) {
  const Eigen::Index steps = t.horizon();
  const Eigen::Index n = t.states.cols();
  FilterRun out;
  out.estimates.resize(steps, n);

  const auto start = std::chrono::steady_clock::now();
  FilterState state = initialize(kind, model);
  Eigen::Index k = 0;
  for (; k < steps; ++k) {
    try {
      state = step(kind, state, model, t.controls.row(k).transpose(),
                   t.measurements.row(k).transpose())
                  .state;
    } catch (const Error& e) {
      const int at = static_cast<int>(k) + 1;
      if (e.code() == ErrorCode::singular_innovation_cov) {
        state.failure = Failure{FailureCause::singular_innovation_cov, at};
      } else if (e.code() == ErrorCode::factorization_failure ||
                 e.code() == ErrorCode::not_positive_semidefinite) {
        state.failure = Failure{FailureCause::factorization_failure, at};
      } else {
        throw;
      }
    }
    if (state.failed()) break;
    out.estimates.row(k) = state.x_hat.transpose();
  }
  if (timing) {
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  if (k < steps) {
    out.estimates.bottomRows(steps - k).setConstant(std::numeric_limits<double>::quiet_NaN());
  }
  out.failure = state.failure;
  out.dp_reciprocals = state.dp_reciprocals;
  return out;
}

RunResult run_once(const RunConfig& config, const std::vector<FilterModel>& models, int j) {
  const SimulationOptions sim{config.initial_state};
  const Trajectory t = simulate(config.model, config.horizon, Eigen::MatrixXd(),
                                stream_seed(config.base_seed, static_cast<std::uint64_t>(j)), sim);
  const std::uint64_t digest = trajectory_digest(t);

  RunResult out;
  out.truth = t.states;
  out.filters.reserve(config.filters.size());
  for (std::size_t f = 0; f < config.filters.size(); ++f) {
    out.filters.push_back(run_filter(config.filters[f], models[f], t, config.timing));
    if (trajectory_digest(t) != digest) {
      throw std::logic_error("monte_carlo: trajectory changed while filtering");
    }
  }
  return out;
}

int resolve_threads(int requested, int runs) {
  int threads = requested;
  if (threads == 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(threads, 1, runs);
}

}  // namespace

void RunConfig::validate() const {
  if (runs < 1) throw Error(ErrorCode::invalid_input, "run config: runs must be >= 1");
  if (horizon < 1) throw Error(ErrorCode::invalid_input, "run config: horizon must be >= 1");
  if (filters.empty()) throw Error(ErrorCode::invalid_input, "run config: no filters selected");
  if (threads < 0) throw Error(ErrorCode::invalid_input, "run config: threads must be >= 0");
  model.validate();
}

const FilterOutcome& MonteCarloReport::outcome(FilterKind kind) const {
  for (const FilterOutcome& o : outcomes) {
    if (o.filter == kind) return o;
  }
  throw Error(ErrorCode::invalid_input,
              "monte_carlo report has no filter " + std::string(to_string(kind)));
}

MonteCarloReport monte_carlo(const RunConfig& config) {
  config.validate();
  std::vector<FilterModel> models;
  models.reserve(config.filters.size());
  for (std::size_t f = 0; f < config.filters.size(); ++f) {
    models.emplace_back(config.model, config.filter_options);
  }

  std::vector<RunResult> results(static_cast<std::size_t>(config.runs));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int j = next++; j < config.runs; j = next++) {
      try {
        results[static_cast<std::size_t>(j)] = run_once(config, models, j);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = config.runs;
      }
    }
  };
  const int threads = resolve_threads(config.threads, config.runs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  MonteCarloReport report;
  report.runs = config.runs;
  report.horizon = config.horizon;
  const Eigen::Index n = config.model.state_dim();
  std::vector<Eigen::MatrixXd> truth;
  truth.reserve(results.size());
  Eigen::MatrixXd truth_final(config.runs, n);
  for (std::size_t j = 0; j < results.size(); ++j) {
    truth_final.row(static_cast<Eigen::Index>(j)) = results[j].truth.bottomRows(1);
    truth.push_back(std::move(results[j].truth));
  }

  for (std::size_t f = 0; f < config.filters.size(); ++f) {
    FilterOutcome o{config.filters[f], {}, 0.0, 0, 0};
    std::vector<Eigen::MatrixXd> estimates;
    estimates.reserve(results.size());
    Eigen::MatrixXd final_estimates(config.runs, n);
    double seconds = 0.0;
    for (std::size_t j = 0; j < results.size(); ++j) {
      FilterRun& run = results[j].filters[f];
      final_estimates.row(static_cast<Eigen::Index>(j)) = run.estimates.bottomRows(1);
      seconds += run.seconds;
      o.dp_reciprocals += run.dp_reciprocals;
      if (run.failure) {
        ++o.failed_runs;
        if (!o.errors.failure ||
            precedence(cell_of(run.failure->cause)) >
                precedence(cell_of(o.errors.failure->cause))) {
          o.errors.failure = run.failure;
        }
      }
      estimates.push_back(std::move(run.estimates));
    }
    o.errors.rmse = rmse(truth, estimates);
    o.errors.mre_percent = mre(truth_final, final_estimates);
    o.errors.rmse_norm = rmse_norm(o.errors.rmse);
    o.mean_seconds = seconds / config.runs;
    report.outcomes.push_back(std::move(o));
  }
  return report;
}

std::string_view to_string(CellClass cell) noexcept {
  switch (cell) {
    case CellClass::finite: return "finite";
    case CellClass::nan: return "NaN";
    case CellClass::inf: return "Inf";
    case CellClass::fail: return "FAIL";
  }
  return "?";
}

CellClass classify(const ErrorReport& report) {
  if (report.failure) return cell_of(report.failure->cause);
  if (std::isnan(report.rmse_norm)) return CellClass::nan;
  if (std::isinf(report.rmse_norm)) return CellClass::inf;
  return CellClass::finite;
}

const SweepCell& SweepReport::cell(FilterKind kind, std::size_t delta_index) const {
  for (std::size_t f = 0; f < filters.size(); ++f) {
    if (filters[f] == kind) return cells[f].at(delta_index);
  }
  throw Error(ErrorCode::invalid_input,
              "sweep report has no filter " + std::string(to_string(kind)));
}

SweepReport sweep(std::span<const double> deltas, const RunConfig& config) {
  if (deltas.empty()) throw Error(ErrorCode::invalid_input, "sweep: no delta values");
  SweepReport report;
  report.deltas.assign(deltas.begin(), deltas.end());
  report.filters = config.filters;
  report.cells.assign(config.filters.size(), {});
  report.mean_seconds.assign(config.filters.size(), 0.0);
  for (double delta : deltas) {
    RunConfig cfg = config;
    cfg.model = example2(delta);
    const MonteCarloReport mc = monte_carlo(cfg);
    for (std::size_t f = 0; f < mc.outcomes.size(); ++f) {
      const FilterOutcome& o = mc.outcomes[f];
      report.cells[f].push_back({classify(o.errors), o.errors.rmse_norm, o.errors.failure});
      report.mean_seconds[f] += o.mean_seconds / static_cast<double>(deltas.size());
    }
  }
  return report;
}

std::vector<double> default_deltas() {
  return {1e-1, 1e-2, 1e-3, 1e-4,  1e-5,  1e-6,  1e-7,
          1e-8, 1e-9, 1e-10, 1e-11, 1e-12, 1e-13, 1e-14};
}

}  // namespace fkf
