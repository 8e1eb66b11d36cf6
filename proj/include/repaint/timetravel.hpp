#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace repaint {

/// Sequence of diffusion-time positions visited by the sampler.
///
/// Positions follow the jump-schedule convention: they start at T-1, end at
/// the sentinel -1, and every consecutive pair differs by exactly one.
/// Position p holds the latent x_{p+1}, so the first entry is pure noise
/// x_T and the sentinel is the clean output x_0. A decreasing pair p -> p-1
/// is one reverse step at diffusion time t = p+1 (one denoiser call); an
/// increasing pair p -> p+1 re-noises forward to diffusion time t = p+2.
struct TimeSchedule {
  std::vector<int> times;
  int steps = 0;
  int jump_length = 1;
  int resamplings = 1;
  // Set when jump_length >= steps: no jump position exists and the plain
  // descending schedule was returned.
  bool jumps_disabled = false;

  std::size_t transition_count() const { return times.empty() ? 0 : times.size() - 1; }
  std::size_t reverse_count() const;
  std::size_t forward_count() const;
};

/// Resampling schedule with jump length j and r visits per jump position.
///
/// Jump positions are the multiples of j in [0, T-j); at each, when the
/// descent reaches it, the schedule climbs back j positions, r-1 times in
/// total.
TimeSchedule generate_jump_schedule(int steps, int jump_length, int resamplings);

// Plain descending schedule T-1, ..., 0, -1.
TimeSchedule descending_schedule(int steps);

/// Slow-down baseline: a descending schedule over steps * factor positions.
/// `steps` records the new step count; the caller rebuilds the noise schedule
/// at that resolution so each step adds less variance.
struct SlowdownPlan {
  int steps = 0;
  int factor = 1;
  TimeSchedule schedule;
};
SlowdownPlan generate_slowdown_schedule(int steps, int factor);

enum class TransitionKind {
  Reverse,  // p -> p-1, one denoiser call at t = p+1
  Forward,  // p -> p+1, forward_step to t = p+2
  Renoise,  // -1 -> p, one-shot forward_sample of x_0 to t = p+1
};

struct Transition {
  TransitionKind kind;
  int from;
  int to;

  friend bool operator==(const Transition&, const Transition&) = default;
};

std::vector<Transition> transitions_of(const TimeSchedule& schedule);

/// SDEdit-style restart plan: reverse from T down to T/2, then `repeats`
/// passes T/2 -> 0, re-noising the clean output back to T/2 in one shot
/// between consecutive passes.
struct SdeditPlan {
  int steps = 0;
  int repeats = 0;
  std::vector<Transition> transitions;

  std::size_t reverse_count() const;
};
SdeditPlan generate_sdedit_schedule(int steps, int repeats);

// Throws ValueError when the schedule violates any TimeSchedule invariant.
void validate_schedule(const TimeSchedule& schedule);

// Number of reverse transitions (denoiser evaluations) for (T, j, r).
std::size_t jump_schedule_nfe(int steps, int jump_length, int resamplings);

// One integer per line.
void write_schedule_text(std::ostream& out, const TimeSchedule& schedule);
// Human-readable counts: T, j, r, transitions, reverse/forward steps.
void write_schedule_summary(std::ostream& out, const TimeSchedule& schedule);

}  // namespace repaint
