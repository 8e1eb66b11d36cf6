#include "repaint/timetravel.hpp"

#include <algorithm>
#include <cstdlib>
#include <ostream>

#include "repaint/error.hpp"

namespace repaint {

std::size_t TimeSchedule::reverse_count() const {
  std::size_t n = 0;
  for (std::size_t i = 1; i < times.size(); ++i) n += times[i] < times[i - 1] ? 1 : 0;
  return n;
}

std::size_t TimeSchedule::forward_count() const { return transition_count() - reverse_count(); }

namespace {

void require_positive(int value, const char* name) {
  if (value < 1) throw ValueError(std::string(name) + " must be >= 1, got " + std::to_string(value));
}

}  // namespace

TimeSchedule descending_schedule(int steps) {
  require_positive(steps, "T");
  TimeSchedule out;
  out.steps = steps;
  out.times.reserve(static_cast<std::size_t>(steps) + 1);
  for (int p = steps - 1; p >= -1; --p) out.times.push_back(p);
  return out;
}

TimeSchedule generate_jump_schedule(int steps, int jump_length, int resamplings) {
  require_positive(steps, "T");
  require_positive(jump_length, "jump length");
  require_positive(resamplings, "resampling count");

  // remaining[p] counts the climbs still owed at jump position p.
  std::vector<int> remaining(static_cast<std::size_t>(steps), 0);
  for (int p = 0; p < steps - jump_length; p += jump_length) remaining[p] = resamplings - 1;

  TimeSchedule out;
  out.steps = steps;
  out.jump_length = jump_length;
  out.resamplings = resamplings;
  out.jumps_disabled = jump_length >= steps;
  out.times.reserve(jump_schedule_nfe(steps, jump_length, resamplings) * 2);

  int p = steps;
  while (p >= 1) {
    --p;
    out.times.push_back(p);
    if (remaining[p] > 0) {
      --remaining[p];
      for (int k = 0; k < jump_length; ++k) out.times.push_back(++p);
    }
  }
  out.times.push_back(-1);
  return out;
}

std::size_t jump_schedule_nfe(int steps, int jump_length, int resamplings) {
  require_positive(steps, "T");
  require_positive(jump_length, "jump length");
  require_positive(resamplings, "resampling count");
  const int positions = steps > jump_length ? (steps - jump_length + jump_length - 1) / jump_length : 0;
  return static_cast<std::size_t>(steps) +
         static_cast<std::size_t>(positions) * static_cast<std::size_t>(jump_length) *
             static_cast<std::size_t>(resamplings - 1);
}

SlowdownPlan generate_slowdown_schedule(int steps, int factor) {
  require_positive(steps, "T");
  require_positive(factor, "slow-down factor");
  SlowdownPlan plan;
  plan.steps = steps * factor;
  plan.factor = factor;
  plan.schedule = descending_schedule(plan.steps);
  return plan;
}

std::vector<Transition> transitions_of(const TimeSchedule& schedule) {
  std::vector<Transition> out;
  out.reserve(schedule.transition_count());
  for (std::size_t i = 1; i < schedule.times.size(); ++i) {
    const int from = schedule.times[i - 1];
    const int to = schedule.times[i];
    out.push_back({to < from ? TransitionKind::Reverse : TransitionKind::Forward, from, to});
  }
  return out;
}

std::size_t SdeditPlan::reverse_count() const {
  return static_cast<std::size_t>(
      std::count_if(transitions.begin(), transitions.end(),
                    [](const Transition& tr) { return tr.kind == TransitionKind::Reverse; }));
}

SdeditPlan generate_sdedit_schedule(int steps, int repeats) {
  require_positive(steps, "T");
  require_positive(repeats, "SDEdit repeat count");
  if (steps % 2 != 0) throw ValueError("SDEdit plan needs an even T, got " + std::to_string(steps));
  const int mid = steps / 2 - 1;  // position of x_{T/2}

  SdeditPlan plan;
  plan.steps = steps;
  plan.repeats = repeats;
  for (int p = steps - 1; p > mid; --p) plan.transitions.push_back({TransitionKind::Reverse, p, p - 1});
  for (int k = 0; k < repeats; ++k) {
    if (k > 0) plan.transitions.push_back({TransitionKind::Renoise, -1, mid});
    for (int p = mid; p >= 0; --p) plan.transitions.push_back({TransitionKind::Reverse, p, p - 1});
  }
  return plan;
}

void validate_schedule(const TimeSchedule& schedule) {
  const auto& ts = schedule.times;
  if (schedule.steps < 1) throw ValueError("schedule has T < 1");
  if (ts.size() < 2) throw ValueError("schedule has fewer than two positions");
  if (ts.front() != schedule.steps - 1) throw ValueError("schedule must start at T-1");
  if (ts.back() != -1) throw ValueError("schedule must end at -1");
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    if (ts[i] < 0 || ts[i] > schedule.steps - 1) {
      throw ValueError("schedule position " + std::to_string(ts[i]) + " at index " + std::to_string(i) +
                       " outside [0, T-1]");
    }
    if (std::abs(ts[i + 1] - ts[i]) != 1) {
      throw ValueError("schedule step at index " + std::to_string(i) + " is not +-1");
    }
  }
}

void write_schedule_text(std::ostream& out, const TimeSchedule& schedule) {
  for (int p : schedule.times) out << p << '\n';
}

void write_schedule_summary(std::ostream& out, const TimeSchedule& schedule) {
  out << "T=" << schedule.steps << " jump_length=" << schedule.jump_length
      << " resamplings=" << schedule.resamplings << '\n'
      << "positions=" << schedule.times.size() << " transitions=" << schedule.transition_count()
      << " reverse=" << schedule.reverse_count() << " forward=" << schedule.forward_count() << '\n';
  if (schedule.jumps_disabled) out << "warning: jump length >= T, no resampling applied\n";
}

}  // namespace repaint
