#include "fkf/model.hpp"

#include <array>
#include <cstring>
#include <string>
#include <utility>

#include "fkf/arrays.hpp"
#include "fkf/errors.hpp"
#include "fkf/rng.hpp"

namespace fkf {
namespace {

constexpr std::array<std::pair<ModelField, std::string_view>, 6> kFieldNames{{
    {ModelField::f, "f"},
    {ModelField::b, "b"},
    {ModelField::g, "g"},
    {ModelField::h, "h"},
    {ModelField::theta, "theta"},
    {ModelField::r, "r"},
}};

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::invalid_model, "invalid model: " + what);
}

void check_shape(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols,
                 const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    invalid(name + " must be " + std::to_string(rows) + "x" + std::to_string(cols) +
            ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) invalid(name + " has non-finite entries");
}

void check_covariance(const Eigen::MatrixXd& m, const std::string& name) {
  if (!arrays::is_symmetric(m)) invalid(name + " is not symmetric");
  if (!arrays::is_psd(m)) invalid(name + " is not positive semidefinite");
}

// Q diag(d_sqrt): a left factor S with S S^T = m.
Eigen::MatrixXd sampling_root(const Eigen::MatrixXd& m) {
  const arrays::SvdFactors f = arrays::psd_svd(m);
  return f.q * f.d_sqrt.asDiagonal();
}

Eigen::VectorXd draw(NormalStream& stream, Eigen::Index size) {
  Eigen::VectorXd xi(size);
  for (Eigen::Index i = 0; i < size; ++i) xi(i) = stream.next();
  return xi;
}

}  // namespace

std::string_view to_string(ModelField field) noexcept {
  for (const auto& [f, name] : kFieldNames) {
    if (f == field) return name;
  }
  return "?";
}

std::optional<ModelField> parse_model_field(std::string_view name) noexcept {
  for (const auto& [f, n] : kFieldNames) {
    if (n == name) return f;
  }
  return std::nullopt;
}

void StateSpaceModel::set_override(int k, ModelField field, Eigen::MatrixXd matrix) {
  StepOverride& o = overrides[k];
  switch (field) {
    case ModelField::f: o.f = std::move(matrix); break;
    case ModelField::b: o.b = std::move(matrix); break;
    case ModelField::g: o.g = std::move(matrix); break;
    case ModelField::h: o.h = std::move(matrix); break;
    case ModelField::theta: o.theta = std::move(matrix); break;
    case ModelField::r: o.r = std::move(matrix); break;
  }
}

StepMatrices StateSpaceModel::at(int k) const {
  const auto it = overrides.find(k);
  if (it == overrides.end()) return {f, b, g, theta, h, r};
  const StepOverride& o = it->second;
  return {o.f ? *o.f : f,         o.b ? *o.b : b, o.g ? *o.g : g,
          o.theta ? *o.theta : theta, o.h ? *o.h : h, o.r ? *o.r : r};
}

void StateSpaceModel::validate() const {
  const Eigen::Index n = f.rows();
  const Eigen::Index d = b.cols();
  const Eigen::Index p = g.cols();
  const Eigen::Index m = h.rows();
  if (n == 0) invalid("state dimension is zero");
  if (m == 0) invalid("measurement dimension is zero");

  check_shape(f, n, n, "f");
  check_shape(b, n, d, "b");
  check_shape(g, n, p, "g");
  check_shape(h, m, n, "h");
  check_shape(theta, p, p, "theta");
  check_shape(r, m, m, "r");
  check_shape(pi0, n, n, "pi0");
  if (x0_mean.size() != n) invalid("x0_mean must have " + std::to_string(n) + " entries");
  if (!x0_mean.allFinite()) invalid("x0_mean has non-finite entries");

  check_covariance(theta, "theta");
  check_covariance(r, "r");
  check_covariance(pi0, "pi0");

  for (const auto& [k, o] : overrides) {
    const std::string at = " (override k=" + std::to_string(k) + ")";
    if (k < 1) invalid("override step must be >= 1" + at);
    if (o.f) check_shape(*o.f, n, n, "f" + at);
    if (o.b) check_shape(*o.b, n, d, "b" + at);
    if (o.g) check_shape(*o.g, n, p, "g" + at);
    if (o.h) check_shape(*o.h, m, n, "h" + at);
    if (o.theta) {
      check_shape(*o.theta, p, p, "theta" + at);
      check_covariance(*o.theta, "theta" + at);
    }
    if (o.r) {
      check_shape(*o.r, m, m, "r" + at);
      check_covariance(*o.r, "r" + at);
    }
  }
}

StateSpaceModel example1() {
  StateSpaceModel model;
  model.f.resize(4, 4);
  model.f << 1.0, 1.0, 0.5, 0.5,
             0.0, 1.0, 1.0, 1.0,
             0.0, 0.0, 1.0, 0.0,
             0.0, 0.0, 0.0, 0.606;
  model.b = Eigen::MatrixXd::Zero(4, 1);
  model.g = Eigen::MatrixXd::Identity(4, 4);
  model.h.resize(1, 4);
  model.h << 1.0, 0.0, 0.0, 0.0;
  model.theta = Eigen::MatrixXd::Zero(4, 4);
  model.theta(3, 3) = 0.63e-2;
  model.r = Eigen::MatrixXd::Identity(1, 1);
  model.x0_mean = Eigen::VectorXd::Zero(4);
  model.pi0 = Eigen::Vector4d(1.0, 1.0, 1.0, 1e-2).asDiagonal();
  return model;
}

StateSpaceModel example2(double delta) {
  if (!(delta > 0.0) || delta > 1.0) {
    throw Error(ErrorCode::invalid_input, "example2: delta must lie in (0, 1]");
  }
  StateSpaceModel model = example1();
  model.h.resize(2, 4);
  model.h << 1.0, 1.0, 1.0, 1.0,
             1.0, 1.0, 1.0, 1.0 + delta;
  model.r = delta * delta * Eigen::MatrixXd::Identity(2, 2);
  model.pi0 = Eigen::MatrixXd::Identity(4, 4);
  return model;
}

Trajectory simulate(const StateSpaceModel& model, int horizon,
                    const Eigen::MatrixXd& controls, std::uint64_t seed,
                    SimulationOptions options) {
  model.validate();
  if (horizon < 1) {
    throw Error(ErrorCode::invalid_input, "simulate: horizon must be >= 1");
  }
  const Eigen::Index n = model.state_dim();
  const Eigen::Index d = model.control_dim();
  const Eigen::Index p = model.noise_dim();
  const Eigen::Index m = model.measurement_dim();

  Trajectory out;
  out.seed = seed;
  if (controls.size() == 0) {
    out.controls = Eigen::MatrixXd::Zero(horizon, d);
  } else {
    if (controls.rows() != horizon || controls.cols() != d) {
      throw Error(ErrorCode::invalid_input, "simulate: controls must be K x d");
    }
    if (!controls.allFinite()) {
      throw Error(ErrorCode::invalid_input, "simulate: non-finite controls");
    }
    out.controls = controls;
  }
  out.states.resize(horizon, n);
  out.measurements.resize(horizon, m);

  NormalStream x0_stream(stream_seed(seed, static_cast<std::uint64_t>(NoiseRole::initial_state)));
  NormalStream w_stream(stream_seed(seed, static_cast<std::uint64_t>(NoiseRole::process)));
  NormalStream v_stream(stream_seed(seed, static_cast<std::uint64_t>(NoiseRole::measurement)));

  Eigen::VectorXd x = model.x0_mean;
  if (options.initial_state == InitialState::sampled) {
    x += sampling_root(model.pi0) * draw(x0_stream, n);
  }

  const Eigen::MatrixXd theta_root = sampling_root(model.theta);
  const Eigen::MatrixXd r_root = sampling_root(model.r);
  for (int k = 1; k <= horizon; ++k) {
    const StepMatrices s = model.at(k);
    const auto ov = model.overrides.find(k);
    const bool theta_over = ov != model.overrides.end() && ov->second.theta;
    const bool r_over = ov != model.overrides.end() && ov->second.r;

    const Eigen::VectorXd w = (theta_over ? sampling_root(s.theta) : theta_root) * draw(w_stream, p);
    const Eigen::VectorXd v = (r_over ? sampling_root(s.r) : r_root) * draw(v_stream, m);
    x = s.f * x + s.b * out.controls.row(k - 1).transpose() + s.g * w;
    out.states.row(k - 1) = x.transpose();
    out.measurements.row(k - 1) = (s.h * x + v).transpose();
  }
  return out;
}

std::uint64_t trajectory_digest(const Trajectory& trajectory) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](const Eigen::MatrixXd& m) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
    const std::size_t count = static_cast<std::size_t>(m.size()) * sizeof(double);
    for (std::size_t i = 0; i < count; ++i) {
      hash ^= bytes[i];
      hash *= 0x100000001b3ULL;
    }
    const std::uint64_t shape[2] = {static_cast<std::uint64_t>(m.rows()),
                                    static_cast<std::uint64_t>(m.cols())};
    for (std::uint64_t v : shape) {
      hash ^= v;
      hash *= 0x100000001b3ULL;
    }
  };
  mix(trajectory.states);
  mix(trajectory.measurements);
  mix(trajectory.controls);
  return hash;
}

}  // namespace fkf
