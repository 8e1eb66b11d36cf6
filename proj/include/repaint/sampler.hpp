#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "repaint/denoiser.hpp"
#include "repaint/timetravel.hpp"

namespace repaint {

enum class SigmaMode {
  BetaTilde,  // sigma_t^2 = (1 - abar_{t-1}) / (1 - abar_t) * beta_t
  Beta,       // sigma_t^2 = beta_t
};

std::string_view to_string(SigmaMode mode);
SigmaMode parse_sigma_mode(std::string_view text);

struct SamplerConfig {
  SigmaMode sigma_mode = SigmaMode::BetaTilde;
  // Overwrite the known region of the returned x_0 with the input exactly.
  bool paste_final_known = true;
  bool record_trace = false;
};

struct TraceFrame {
  std::size_t index;  // position in the driving schedule
  int time;           // schedule position (T-1 .. -1)
  Tensor latent;
};
using SampleTrace = std::vector<TraceFrame>;

struct SampleResult {
  Tensor samples;  // [n, ...sample shape]
  std::size_t nfe = 0;
  std::optional<SampleTrace> trace;
};

double reverse_sigma(const NoiseSchedule& sched, int t, SigmaMode mode);

/// x_{t-1} = mu_theta(x_t, t) + sigma_t z, with z = 0 at t = 1.
/// Throws NumericError naming t if the result is not finite.
Tensor reverse_step(const DenoiserModel& model, const Tensor& x_t, int t, const NoiseSchedule& sched,
                    const SamplerConfig& cfg, Rng& rng);

/// Replace the known coordinates of the batched reverse-step output with a
/// fresh forward sample of the ground truth at time t-1:
/// sqrt(abar_{t-1}) x0 + sqrt(1 - abar_{t-1}) eps, eps drawn over the full
/// batch shape in row-major order. `x0_known` and `mask` have the per-sample
/// shape; mask entries must be exactly 0 or 1 (1 = known).
Tensor condition_step(const Tensor& x0_known, const Tensor& x_unknown_next, const Tensor& mask, int t,
                      const NoiseSchedule& sched, Rng& rng);

// x_t ~ N(sqrt(1 - beta_t) x_{t-1}, beta_t I).
Tensor forward_jump_step(const Tensor& x_prev, int t, const NoiseSchedule& sched, Rng& rng);

/// Mask-conditioned sampling of `chains` independent chains driven by a
/// jump schedule. Starts from x_T ~ N(0, I); every reverse transition is a
/// reverse_step followed by condition_step, every forward transition a
/// forward_jump_step.
SampleResult repaint_inpaint(const DenoiserModel& model, const NoiseSchedule& sched, const TimeSchedule& schedule,
                             const Tensor& x0_known, const Tensor& mask, std::size_t chains,
                             const SamplerConfig& cfg, Rng& rng);

// Same conditioning, driven by an SDEdit restart plan.
SampleResult repaint_inpaint(const DenoiserModel& model, const NoiseSchedule& sched, const SdeditPlan& plan,
                             const Tensor& x0_known, const Tensor& mask, std::size_t chains,
                             const SamplerConfig& cfg, Rng& rng);

SampleResult unconditional_sample(const DenoiserModel& model, const NoiseSchedule& sched,
                                  const TimeSchedule& schedule, const Shape& sample_shape, std::size_t chains,
                                  const SamplerConfig& cfg, Rng& rng);

// Throws ValueError unless every entry is exactly 0 or 1.
void require_binary_mask(const Tensor& mask);

}  // namespace repaint
