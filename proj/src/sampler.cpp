#include "repaint/sampler.hpp"

#include <cmath>
#include <string>

#include "repaint/error.hpp"

namespace repaint {

std::string_view to_string(SigmaMode mode) {
  switch (mode) {
    case SigmaMode::BetaTilde:
      return "beta_tilde";
    case SigmaMode::Beta:
      return "beta";
  }
  return "unknown";
}

SigmaMode parse_sigma_mode(std::string_view text) {
  if (text == "beta_tilde") return SigmaMode::BetaTilde;
  if (text == "beta") return SigmaMode::Beta;
  throw ValueError("unknown sigma mode '" + std::string(text) + "' (expected beta_tilde or beta)");
}

double reverse_sigma(const NoiseSchedule& sched, int t, SigmaMode mode) {
  sched.check_time(t);
  if (mode == SigmaMode::Beta) return std::sqrt(sched.beta(t));
  const double ratio = (1.0 - sched.alpha_bar(t - 1)) / (1.0 - sched.alpha_bar(t));
  return std::sqrt(ratio * sched.beta(t));
}

void require_binary_mask(const Tensor& mask) {
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] != 0.0 && mask[i] != 1.0) {
      throw ValueError("mask entry " + std::to_string(i) + " = " + std::to_string(mask[i]) + " is not binary");
    }
  }
}

Tensor reverse_step(const DenoiserModel& model, const Tensor& x_t, int t, const NoiseSchedule& sched,
                    const SamplerConfig& cfg, Rng& rng) {
  sched.check_time(t);
  const Tensor eps_hat = model.predict_eps(x_t, t, sched);
  require_same_shape(eps_hat, x_t, "denoiser output");
  Tensor out = posterior_mean(eps_hat, x_t, t, sched);
  if (t > 1) {
    const double sigma = reverse_sigma(sched, t, cfg.sigma_mode);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : out.values()) v += sigma * normal(rng);
  }
  if (!out.all_finite()) throw NumericError("non-finite latent after reverse step at t = " + std::to_string(t));
  return out;
}

namespace {

void require_conditioning_shapes(const Tensor& x0_known, const Tensor& mask, const Tensor& batch) {
  require_same_shape(x0_known, mask, "known image and mask");
  if (x0_known.shape() != batch.sample_shape()) {
    throw ShapeError("known image shape " + shape_string(x0_known.shape()) + " does not match sample shape " +
                     shape_string(batch.sample_shape()));
  }
}

// condition_step without validation; the mask is known to be binary.
void apply_known(const Tensor& x0_known, const Tensor& mask, int t, const NoiseSchedule& sched, Tensor& x,
                 Rng& rng) {
  const double keep = std::sqrt(sched.alpha_bar(t - 1));
  const double add = std::sqrt(1.0 - sched.alpha_bar(t - 1));
  const std::size_t width = x.row_size();
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    for (std::size_t k = 0; k < width; ++k) {
      const double eps = normal(rng);
      if (mask[k] == 1.0) row[k] = keep * x0_known[k] + add * eps;
    }
  }
}

struct Conditioning {
  const Tensor& x0_known;
  const Tensor& mask;
};

SampleResult run_transitions(const DenoiserModel& model, const NoiseSchedule& sched,
                             std::span<const Transition> transitions, const Shape& sample_shape,
                             std::size_t chains, const Conditioning* cond, const SamplerConfig& cfg, Rng& rng) {
  if (transitions.empty()) throw ValueError("empty sampling plan");
  if (chains == 0) throw ValueError("need at least one chain");

  SampleResult result;
  Tensor x = normal_tensor(batch_shape(chains, sample_shape), rng);
  if (cfg.record_trace) {
    result.trace.emplace();
    result.trace->push_back({0, transitions.front().from, x});
  }

  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const Transition& tr = transitions[i];
    switch (tr.kind) {
      case TransitionKind::Reverse: {
        const int t = tr.from + 1;
        x = reverse_step(model, x, t, sched, cfg, rng);
        if (cond != nullptr) apply_known(cond->x0_known, cond->mask, t, sched, x, rng);
        ++result.nfe;
        break;
      }
      case TransitionKind::Forward:
        x = forward_jump_step(x, tr.to + 1, sched, rng);
        break;
      case TransitionKind::Renoise: {
        const Tensor noise = normal_tensor(x.shape(), rng);
        x = forward_sample(x, tr.to + 1, noise, sched);
        break;
      }
    }
    if (cfg.record_trace) result.trace->push_back({i + 1, tr.to, x});
  }

  if (cond != nullptr && cfg.paste_final_known) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      auto row = x.row(i);
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (cond->mask[k] == 1.0) row[k] = cond->x0_known[k];
      }
    }
  }
  if (!x.all_finite()) throw NumericError("non-finite final sample");
  result.samples = std::move(x);
  return result;
}

void require_matching_steps(const NoiseSchedule& sched, int steps) {
  if (sched.steps() != steps) {
    throw ValueError("time schedule has T = " + std::to_string(steps) + " but noise schedule has T = " +
                     std::to_string(sched.steps()));
  }
}

}  // namespace

Tensor condition_step(const Tensor& x0_known, const Tensor& x_unknown_next, const Tensor& mask, int t,
                      const NoiseSchedule& sched, Rng& rng) {
  require_conditioning_shapes(x0_known, mask, x_unknown_next);
  require_binary_mask(mask);
  sched.check_time(t);
  Tensor out = x_unknown_next;
  apply_known(x0_known, mask, t, sched, out, rng);
  return out;
}

Tensor forward_jump_step(const Tensor& x_prev, int t, const NoiseSchedule& sched, Rng& rng) {
  sched.check_time(t);
  const Tensor noise = normal_tensor(x_prev.shape(), rng);
  return forward_step(x_prev, t, noise, sched);
}

SampleResult repaint_inpaint(const DenoiserModel& model, const NoiseSchedule& sched, const TimeSchedule& schedule,
                             const Tensor& x0_known, const Tensor& mask, std::size_t chains,
                             const SamplerConfig& cfg, Rng& rng) {
  validate_schedule(schedule);
  require_matching_steps(sched, schedule.steps);
  require_same_shape(x0_known, mask, "known image and mask");
  require_binary_mask(mask);
  const Conditioning cond{x0_known, mask};
  const auto transitions = transitions_of(schedule);
  return run_transitions(model, sched, transitions, x0_known.shape(), chains, &cond, cfg, rng);
}

SampleResult repaint_inpaint(const DenoiserModel& model, const NoiseSchedule& sched, const SdeditPlan& plan,
                             const Tensor& x0_known, const Tensor& mask, std::size_t chains,
                             const SamplerConfig& cfg, Rng& rng) {
  require_matching_steps(sched, plan.steps);
  require_same_shape(x0_known, mask, "known image and mask");
  require_binary_mask(mask);
  const Conditioning cond{x0_known, mask};
  return run_transitions(model, sched, plan.transitions, x0_known.shape(), chains, &cond, cfg, rng);
}

SampleResult unconditional_sample(const DenoiserModel& model, const NoiseSchedule& sched,
                                  const TimeSchedule& schedule, const Shape& sample_shape, std::size_t chains,
                                  const SamplerConfig& cfg, Rng& rng) {
  validate_schedule(schedule);
  require_matching_steps(sched, schedule.steps);
  const auto transitions = transitions_of(schedule);
  return run_transitions(model, sched, transitions, sample_shape, chains, nullptr, cfg, rng);
}

}  // namespace repaint
