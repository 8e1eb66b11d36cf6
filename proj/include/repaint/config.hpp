#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "repaint/error.hpp"
#include "repaint/eval.hpp"
#include "repaint/masks.hpp"
#include "repaint/sampler.hpp"
#include "repaint/schedule.hpp"

namespace repaint {

// Line 0 means the offending value came from a command-line override or a
// default rather than a file line.
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

struct ScheduleSettings {
  ScheduleKind kind = ScheduleKind::Linear;
  int steps = 100;
  double beta_start = 1e-4;
  double beta_end = 0.02;
};

struct TimetravelSettings {
  ScheduleFamily mode = ScheduleFamily::Jump;
  int jump_length = 5;
  int resamplings = 5;
  int slowdown_factor = 2;
  int sdedit_repeats = 2;
};

struct DenoiserSettings {
  std::string kind = "analytic";  // analytic | mlp
  std::string prior = "toy_image";  // toy_image | gaussian2d
  std::string checkpoint;
  double rho = 0.8;  // gaussian2d correlation
};

struct MaskSettings {
  MaskFamily family = MaskFamily::Half;
  int crop = 4;
  int stride = 2;
  std::uint64_t seed = 0;
};

struct DataSettings {
  int height = 8;
  int width = 8;
  double lo = -1.0;  // value mapped to black
  double hi = 1.0;   // value mapped to white
  std::string input;  // optional tensor file with the ground-truth sample
};

struct RunSettings {
  std::uint64_t seed = 0;
  int samples = 4;
  std::string output_dir = "out";
};

struct TrainSettings {
  int steps = 2000;
  int batch = 128;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::vector<int> hidden{64, 64};
  std::string dataset = "two_moons";  // two_moons | prior
  int log_every = 100;
};

struct AblateSettings {
  int chains = 2000;
  int seeds = 20;
  std::vector<int> jump_lengths{1, 5, 10};
  std::vector<int> resamplings{1, 5, 10};
};

struct RunConfig {
  ScheduleSettings schedule;
  TimetravelSettings timetravel;
  SamplerConfig sampler;
  DenoiserSettings denoiser;
  MaskSettings mask;
  DataSettings data;
  RunSettings run;
  TrainSettings train;
  AblateSettings ablate;

  // Line of the most recent assignment of each "section.key".
  std::map<std::string, int, std::less<>> origins;
};

/// Flat `key = value` lines under `[section]` headers; `#` or `;` start a
/// comment. Unknown sections or keys, malformed values and constraint
/// violations raise ConfigError carrying the line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// Assign one "section.key"; call validate_config() once all overrides are in.
// `line` is reported on error.
void apply_setting(RunConfig& config, std::string_view dotted_key, std::string_view value, int line = 0);

// Cross-field constraints (e.g. jump length < T for jump mode).
void validate_config(const RunConfig& config);

// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const RunConfig& config);

}  // namespace repaint
