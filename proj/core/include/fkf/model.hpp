#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string_view>

#include <Eigen/Core>

namespace fkf {

enum class ModelField { f, b, g, h, theta, r };

std::string_view to_string(ModelField field) noexcept;
std::optional<ModelField> parse_model_field(std::string_view name) noexcept;

// Per-step replacements for a time-varying model. An override keyed k
// replaces the matrix used while processing step k: F, B, G and Theta of the
// transition x_{k-1} -> x_k, and H, R of the measurement z_k.
struct StepOverride {
  std::optional<Eigen::MatrixXd> f, b, g, h, theta, r;
};

// Matrices in effect at one step; references into the owning model.
struct StepMatrices {
  const Eigen::MatrixXd& f;
  const Eigen::MatrixXd& b;
  const Eigen::MatrixXd& g;
  const Eigen::MatrixXd& theta;
  const Eigen::MatrixXd& h;
  const Eigen::MatrixXd& r;
};

// x_k = F x_{k-1} + B u_{k-1} + G w_{k-1},  w ~ N(0, Theta)
// z_k = H x_k + v_k,                        v ~ N(0, R)
// x_0 ~ N(x0_mean, pi0)
struct StateSpaceModel {
  Eigen::MatrixXd f;      // n x n
  Eigen::MatrixXd b;      // n x d
  Eigen::MatrixXd g;      // n x p
  Eigen::MatrixXd h;      // m x n
  Eigen::MatrixXd theta;  // p x p, PSD
  Eigen::MatrixXd r;      // m x m, PSD (PD for the conventional filter)
  Eigen::VectorXd x0_mean;
  Eigen::MatrixXd pi0;    // n x n, PSD
  std::map<int, StepOverride> overrides;

  Eigen::Index state_dim() const { return f.rows(); }
  Eigen::Index control_dim() const { return b.cols(); }
  Eigen::Index noise_dim() const { return g.cols(); }
  Eigen::Index measurement_dim() const { return h.rows(); }

  bool time_varying() const { return !overrides.empty(); }

  void set_override(int k, ModelField field, Eigen::MatrixXd matrix);
  StepMatrices at(int k) const;

  /// Throws Error(invalid_model) on inconsistent dimensions, non-finite
  /// entries, asymmetric covariances or non-PSD Theta / R / Pi0.
  void validate() const;
};

/// Satellite in-track motion model (four states, scalar position measurement).
StateSpaceModel example1();

/// example1() dynamics observed through the ill-conditioned pair
/// H = [1 1 1 1; 1 1 1 1+delta], R = delta^2 I, Pi0 = I. Requires 0 < delta <= 1.
StateSpaceModel example2(double delta);

struct Trajectory {
  Eigen::MatrixXd states;        // K x n, row k-1 holds x_k
  Eigen::MatrixXd measurements;  // K x m, row k-1 holds z_k
  Eigen::MatrixXd controls;      // K x d, row k-1 holds u_{k-1}
  std::uint64_t seed = 0;

  Eigen::Index horizon() const { return states.rows(); }
};

enum class InitialState {
  sampled,  // x_0 ~ N(x0_mean, pi0)
  mean,     // x_0 = x0_mean
};

struct SimulationOptions {
  InitialState initial_state = InitialState::sampled;
};

/// Draws one trajectory of length `horizon`. `controls` is K x d or empty
/// (all-zero input). Noise is sampled through SVD factors Q D^{1/2} of the
/// covariances, so rank-deficient Theta / Pi0 / R need no special casing.
/// Bit-identical for identical arguments.
Trajectory simulate(const StateSpaceModel& model, int horizon,
                    const Eigen::MatrixXd& controls, std::uint64_t seed,
                    SimulationOptions options = {});

/// FNV-1a digest over the trajectory contents.
std::uint64_t trajectory_digest(const Trajectory& trajectory) noexcept;

}  // namespace fkf
