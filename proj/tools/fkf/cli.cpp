#include "fkf/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fkf/bench.hpp"
#include "fkf/errors.hpp"
#include "fkf/filters.hpp"
#include "fkf/format.hpp"
#include "fkf/model_io.hpp"

namespace fkf::cli {
namespace {

using nlohmann::json;

struct CommonFlags {
  std::string model;
  int steps = 100;
  std::uint64_t seed = 1;
  std::string out = "-";
  std::string x0;
};

[[noreturn]] void usage(const std::string& what) {
  throw Error(ErrorCode::invalid_input, what);
}

InitialState parse_x0(const std::string& text) {
  return text == "sampled" ? InitialState::sampled : InitialState::mean;
}

std::vector<FilterKind> parse_filters(const std::string& text) {
  if (text == "all") return {std::begin(kAllFilters), std::end(kAllFilters)};
  std::vector<FilterKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto kind = parse_filter_kind(item);
    if (!kind) usage("unknown filter '" + item + "'");
    if (std::find(out.begin(), out.end(), *kind) == out.end()) out.push_back(*kind);
  }
  if (out.empty()) usage("no filters selected");
  return out;
}

int env_threads() {
  const char* value = std::getenv("FK_THREADS");
  if (value == nullptr || *value == '\0') return 0;
  int threads = -1;
  const char* end = value + std::char_traits<char>::length(value);
  const auto res = std::from_chars(value, end, threads);
  if (res.ec != std::errc() || res.ptr != end || threads < 0) {
    usage("FK_THREADS must be a non-negative integer");
  }
  return threads;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) usage("cannot open '" + path + "' for writing");
  file << text;
  if (!file.flush()) usage("failed writing '" + path + "'");
}

std::string trajectory_csv(const Trajectory& t) {
  std::string s = "k";
  for (Eigen::Index i = 1; i <= t.states.cols(); ++i) s += ",x_" + std::to_string(i);
  for (Eigen::Index i = 1; i <= t.measurements.cols(); ++i) s += ",z_" + std::to_string(i);
  for (Eigen::Index i = 1; i <= t.controls.cols(); ++i) s += ",u_" + std::to_string(i);
  s += '\n';
  for (Eigen::Index k = 0; k < t.horizon(); ++k) {
    s += std::to_string(k + 1);
    for (const Eigen::MatrixXd* m : {&t.states, &t.measurements, &t.controls}) {
      for (Eigen::Index i = 0; i < m->cols(); ++i) s += ',' + format_exact((*m)(k, i));
    }
    s += '\n';
  }
  return s;
}

std::string status_of(const ErrorReport& report) {
  const CellClass cell = classify(report);
  return cell == CellClass::finite ? "ok" : std::string(to_string(cell));
}

json failure_json(const std::optional<Failure>& failure) {
  if (!failure) return nullptr;
  return {{"cause", std::string(to_string(failure->cause))}, {"step", failure->step}};
}

std::string run_csv(const MonteCarloReport& report, Eigen::Index n) {
  std::string s = "filter";
  for (Eigen::Index i = 1; i <= n; ++i) s += ",rmse_x" + std::to_string(i);
  for (Eigen::Index i = 1; i <= n; ++i) s += ",mre_x" + std::to_string(i);
  s += ",rmse_norm,cpu_seconds,status\n";
  for (const FilterOutcome& o : report.outcomes) {
    s += std::string(to_string(o.filter));
    for (Eigen::Index i = 0; i < n; ++i) s += ',' + format_number(o.errors.rmse(i));
    for (const auto& m : o.errors.mre_percent) s += ',' + format_optional(m);
    s += ',' + format_number(o.errors.rmse_norm);
    s += ',' + format_number(o.mean_seconds);
    s += ',' + status_of(o.errors) + '\n';
  }
  return s;
}

std::string run_json(const MonteCarloReport& report, const std::string& model,
                     std::uint64_t seed) {
  json filters = json::array();
  for (const FilterOutcome& o : report.outcomes) {
    json mre = json::array();
    for (const auto& m : o.errors.mre_percent) mre.push_back(m ? json(*m) : json(nullptr));
    filters.push_back({
        {"filter", std::string(to_string(o.filter))},
        {"rmse", std::vector<double>(o.errors.rmse.data(),
                                     o.errors.rmse.data() + o.errors.rmse.size())},
        {"mre_percent", mre},
        {"rmse_norm", o.errors.rmse_norm},
        {"cpu_seconds", o.mean_seconds},
        {"status", status_of(o.errors)},
        {"failed_runs", o.failed_runs},
        {"failure", failure_json(o.errors.failure)},
    });
  }
  json doc = {{"model", model},     {"runs", report.runs}, {"steps", report.horizon},
              {"seed", seed},       {"filters", filters}};
  return doc.dump(2) + '\n';
}

std::string sweep_csv(const SweepReport& report) {
  std::string s = "filter";
  for (double d : report.deltas) s += ',' + format_number(d);
  s += '\n';
  for (std::size_t f = 0; f < report.filters.size(); ++f) {
    s += std::string(to_string(report.filters[f]));
    for (const SweepCell& c : report.cells[f]) {
      s += ',';
      s += c.cell == CellClass::finite ? format_number(c.rmse_norm) : std::string(to_string(c.cell));
    }
    s += '\n';
  }
  return s;
}

std::string sweep_json(const SweepReport& report, int runs, int steps, std::uint64_t seed) {
  json rows = json::array();
  for (std::size_t f = 0; f < report.filters.size(); ++f) {
    json cells = json::array();
    for (const SweepCell& c : report.cells[f]) {
      cells.push_back({{"class", std::string(to_string(c.cell))},
                       {"rmse_norm", c.rmse_norm},
                       {"failure", failure_json(c.failure)}});
    }
    rows.push_back({{"filter", std::string(to_string(report.filters[f]))},
                    {"cpu_seconds", report.mean_seconds[f]},
                    {"cells", cells}});
  }
  json doc = {{"deltas", report.deltas}, {"runs", runs}, {"steps", steps},
              {"seed", seed},            {"filters", rows}};
  return doc.dump(2) + '\n';
}

void add_common(CLI::App* cmd, CommonFlags& flags, const std::string& x0_default) {
  flags.x0 = x0_default;
  cmd->add_option("--model", flags.model, "example1, example2:<delta> or a model JSON file");
  cmd->add_option("--steps", flags.steps, "Number of time steps K")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", flags.seed, "Base random seed");
  cmd->add_option("--out", flags.out, "Output file ('-' for stdout)");
  cmd->add_option("--x0", flags.x0, "Initial true state: sampled from N(x0_mean, pi0) or mean")
      ->check(CLI::IsMember({"sampled", "mean"}));
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kalman filter comparison tool", "fkf"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  auto* sim = app.add_subcommand("simulate", "Simulate a trajectory and write it as CSV");
  add_common(sim, sim_flags, "sampled");
  sim->get_option("--model")->required();

  CommonFlags run_flags;
  std::string run_filters = "all";
  std::string run_format = "csv";
  int run_runs = 500;
  auto* run_cmd = app.add_subcommand("run", "Monte-Carlo comparison of filters on one model");
  add_common(run_cmd, run_flags, "mean");
  run_cmd->get_option("--model")->required();
  run_cmd->add_option("--filters", run_filters, "Comma-separated filters or 'all'");
  run_cmd->add_option("--runs", run_runs, "Monte-Carlo runs M")->check(CLI::PositiveNumber);
  run_cmd->add_option("--format", run_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  CommonFlags sweep_flags;
  std::string sweep_filters = "all";
  std::string sweep_format = "csv";
  std::string sweep_deltas = "1e-1..1e-14";
  int sweep_runs = 500;
  auto* sweep_cmd = app.add_subcommand("sweep", "Ill-conditioning sweep over delta (example2)");
  add_common(sweep_cmd, sweep_flags, "mean");
  sweep_cmd->remove_option(sweep_cmd->get_option("--model"));
  sweep_cmd->add_option("--deltas", sweep_deltas, "Comma-separated list or decade range a..b");
  sweep_cmd->add_option("--filters", sweep_filters, "Comma-separated filters or 'all'");
  sweep_cmd->add_option("--runs", sweep_runs, "Monte-Carlo runs M per delta")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--format", sweep_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CommonFlags ll_flags;
  std::string ll_filter = "svd-kf";
  std::string ll_method = "svd";
  auto* ll = app.add_subcommand("loglik", "Innovation log-likelihood of one simulated record");
  add_common(ll, ll_flags, "sampled");
  ll->get_option("--model")->required();
  ll->remove_option(ll->get_option("--out"));
  ll->add_option("--filter", ll_filter, "Filter producing the innovations");
  ll->add_option("--method", ll_method, "conventional or svd")
      ->check(CLI::IsMember({"conventional", "svd"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  if (sim->parsed()) {
    const StateSpaceModel model = resolve_model(sim_flags.model);
    const Trajectory t = simulate(model, sim_flags.steps, Eigen::MatrixXd(), sim_flags.seed,
                                  {parse_x0(sim_flags.x0)});
    emit(trajectory_csv(t), sim_flags.out, out);
  } else if (run_cmd->parsed()) {
    RunConfig config;
    config.model = resolve_model(run_flags.model);
    config.filters = parse_filters(run_filters);
    config.runs = run_runs;
    config.horizon = run_flags.steps;
    config.base_seed = run_flags.seed;
    config.initial_state = parse_x0(run_flags.x0);
    config.threads = env_threads();
    const MonteCarloReport report = monte_carlo(config);
    emit(run_format == "json" ? run_json(report, run_flags.model, run_flags.seed)
                              : run_csv(report, config.model.state_dim()),
         run_flags.out, out);
  } else if (sweep_cmd->parsed()) {
    const std::vector<double> deltas = parse_deltas(sweep_deltas);
    RunConfig config;
    config.model = example2(deltas.front());
    config.filters = parse_filters(sweep_filters);
    config.runs = sweep_runs;
    config.horizon = sweep_flags.steps;
    config.base_seed = sweep_flags.seed;
    config.initial_state = parse_x0(sweep_flags.x0);
    config.threads = env_threads();
    const SweepReport report = sweep(deltas, config);
    emit(sweep_format == "json"
             ? sweep_json(report, sweep_runs, sweep_flags.steps, sweep_flags.seed)
             : sweep_csv(report),
         sweep_flags.out, out);
  } else if (ll->parsed()) {
    const auto kind = parse_filter_kind(ll_filter);
    if (!kind) usage("unknown filter '" + ll_filter + "'");
    if (ll_method == "svd" && *kind != FilterKind::svd_kf) {
      usage("--method svd needs the SVD innovation factors of --filter svd-kf");
    }
    const FilterModel model(resolve_model(ll_flags.model));
    const Trajectory t = simulate(model.model(), ll_flags.steps, Eigen::MatrixXd(),
                                  ll_flags.seed, {parse_x0(ll_flags.x0)});
    FilterState state = initialize(*kind, model);
    std::vector<StepReport> reports;
    for (Eigen::Index k = 0; k < t.horizon(); ++k) {
      StepResult r = step(*kind, state, model, t.controls.row(k).transpose(),
                          t.measurements.row(k).transpose());
      if (r.state.failed()) {
        throw Error(ErrorCode::singular_innovation_cov,
                    "filter failed at step " + std::to_string(r.state.failure->step) + " (" +
                        std::string(to_string(r.state.failure->cause)) + ")");
      }
      reports.push_back(std::move(r.report));
      state = std::move(r.state);
    }
    const double value =
        ll_method == "svd" ? loglik_svd(reports) : loglik_conventional(reports);
    out << format_number(value, 12) << '\n';
  }
  return kSuccess;
}

}  // namespace

std::vector<double> parse_deltas(const std::string& text) {
  auto to_double = [&](const std::string& item) {
    double value = 0.0;
    const char* end = item.data() + item.size();
    const auto res = std::from_chars(item.data(), end, value);
    if (res.ec != std::errc() || res.ptr != end || !(value > 0.0) || value > 1.0) {
      usage("invalid delta '" + item + "' (need 0 < delta <= 1)");
    }
    return value;
  };
  auto decade = [&](const std::string& item) {
    const double value = to_double(item);
    const long e = std::lround(std::log10(value));
    if (std::abs(std::log10(value) - static_cast<double>(e)) > 1e-9) {
      usage("range endpoints must be powers of ten, got '" + item + "'");
    }
    return static_cast<int>(e);
  };

  std::vector<double> out;
  if (const auto pos = text.find(".."); pos != std::string::npos) {
    const int from = decade(text.substr(0, pos));
    const int to = decade(text.substr(pos + 2));
    if (to > from) usage("delta range must be descending");
    for (int e = from; e >= to; --e) out.push_back(to_double("1e" + std::to_string(e)));
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(item));
  if (out.empty()) usage("empty delta list");
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] < out[i - 1])) usage("deltas must be strictly descending");
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const Error& e) {
    err << "fkf: " << e.what() << '\n';
    return e.code() == ErrorCode::factorization_failure ? kInternalError : kUsageError;
  } catch (const std::exception& e) {
    err << "fkf: internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace fkf::cli
