#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "repaint/gaussian_mixture.hpp"
#include "repaint/sampler.hpp"

namespace repaint {

/// Mean squared error over the unknown coordinates (mask == 0). The mask has
/// the full shape of `output` or its per-sample shape, broadcast over rows.
/// Throws when there is no unknown coordinate.
double masked_mse(const Tensor& output, const Tensor& reference, const Tensor& mask);

struct GaussianConditional {
  std::vector<std::size_t> unknown;  // indices of unknown coordinates
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

// Closed-form conditional of the unknown coordinates given the known ones.
GaussianConditional gaussian_conditional(const GaussianMixturePrior& prior, const Tensor& x_known, const Tensor& mask);

struct MomentError {
  double mean_err;  // ||m - m*|| / ||m*||, absolute when m* = 0
  double cov_err;   // ||C - C*||_F / ||C*||_F
};

/// Empirical conditional moments of the unknown coordinates of `samples`
/// ([n, d], n >= 1000) against the closed form for a single-Gaussian prior.
MomentError conditional_moment_error(const Tensor& samples, const GaussianMixturePrior& prior,
                                     const Tensor& x_known, const Tensor& mask);

// Mean L2 distance over unordered pairs of rows; needs >= 2 rows.
double diversity_score(const Tensor& outputs);

/// Inpainting benchmark with an analytic single-Gaussian prior.
struct GaussianBenchmark {
  GaussianMixturePrior prior;
  Tensor x_known;  // [d]
  Tensor mask;     // [d], 1 = known
  ScheduleKind schedule_kind = ScheduleKind::Linear;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  SamplerConfig sampler;
  std::size_t chains = 2000;
  std::vector<std::uint64_t> seeds;
};

// Zero-mean unit-variance 2-D Gaussian with correlation 0.8, first
// coordinate known at 1.5, 2000 chains, seeds 0..19.
GaussianBenchmark default_gaussian_benchmark();

NoiseSchedule benchmark_schedule(const GaussianBenchmark& bench, int steps);

enum class ScheduleFamily { Jump, Slowdown, Sdedit };
std::string_view to_string(ScheduleFamily family);

struct SettingSpec {
  ScheduleFamily family = ScheduleFamily::Jump;
  int steps = 0;
  int jump_length = 1;
  int resamplings = 1;
  int slowdown_factor = 1;
  int sdedit_repeats = 1;

  std::string label() const;
  std::size_t nfe() const;
};

struct AblationRow {
  SettingSpec setting;
  std::size_t nfe = 0;
  std::uint64_t seed = 0;
  double mean_err = 0.0;
  double cov_err = 0.0;
};

struct SettingSummary {
  SettingSpec setting;
  std::size_t nfe = 0;
  std::size_t seeds = 0;
  double mean_err = 0.0;  // averaged over seeds
  double cov_err = 0.0;
};

struct AblationReport {
  std::string title;
  std::string metadata;
  std::vector<AblationRow> rows;

  // Per-setting averages in first-appearance order.
  std::vector<SettingSummary> summarize() const;
  SettingSummary summary_for(const std::string& label) const;

  // Header row, then one row per (setting, seed).
  void write_csv(std::ostream& out) const;
  void write_summary(std::ostream& out) const;
};

// One sampler run of `setting` on the benchmark with the given seed.
AblationRow run_setting(const GaussianBenchmark& bench, const SettingSpec& setting, std::uint64_t seed);

// Every setting over every benchmark seed; seeds run concurrently.
AblationReport run_settings(const GaussianBenchmark& bench, std::span<const SettingSpec> settings, std::string title);

struct ResampleBudget {
  int steps;
  int jump_length;
  int resamplings;
  int slowdown_factor;
};

/// Jump schedule vs. slow-down at equal NFE for each budget. Throws
/// ValueError when a budget's two NFE counts differ.
AblationReport run_resample_vs_slowdown(const GaussianBenchmark& bench, std::span<const ResampleBudget> budgets);

AblationReport run_jump_grid(const GaussianBenchmark& bench, int steps, std::span<const int> jump_lengths,
                             std::span<const int> resamplings);

/// Jump schedule (steps, j, r) vs. SDEdit restarts with n_repeats at equal
/// NFE; throws ValueError when the counts differ.
AblationReport run_sdedit_comparison(const GaussianBenchmark& bench, int steps, int jump_length, int resamplings,
                                     int sdedit_repeats);

}  // namespace repaint
