#include "repaint/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace repaint {

ConfigError::ConfigError(int line, const std::string& message)
    : Error(line > 0 ? "config line " + std::to_string(line) + ": " + message : "config: " + message), line_(line) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string strip_quotes(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

template <typename T>
T parse_number(std::string_view value, int line, std::string_view key) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(line, "'" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view value, int line, std::string_view key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(line, "'" + std::string(key) + "' expects true or false, got '" + std::string(value) + "'");
}

std::vector<int> parse_int_list(std::string_view value, int line, std::string_view key) {
  std::vector<int> out;
  while (!value.empty()) {
    const auto comma = value.find(',');
    out.push_back(parse_number<int>(trim(value.substr(0, comma)), line, key));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError(line, "'" + std::string(key) + "' expects a comma-separated list");
  return out;
}

template <typename Enum, typename Parse>
Enum parse_enum(std::string_view value, int line, Parse parse) {
  try {
    return parse(value);
  } catch (const ValueError& e) {
    throw ConfigError(line, e.what());
  }
}

using Setter = std::function<void(RunConfig&, std::string_view, int)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    const auto number = [](std::string_view key, auto member) {
      return [key, member](RunConfig& c, std::string_view v, int line) {
        auto& field = member(c);
        field = parse_number<std::remove_reference_t<decltype(field)>>(v, line, key);
      };
    };
    t["schedule.kind"] = [](RunConfig& c, std::string_view v, int line) {
      c.schedule.kind = parse_enum<ScheduleKind>(v, line, parse_schedule_kind);
    };
    t["schedule.steps"] = number("schedule.steps", [](RunConfig& c) -> int& { return c.schedule.steps; });
    t["schedule.beta_start"] = number("schedule.beta_start", [](RunConfig& c) -> double& { return c.schedule.beta_start; });
    t["schedule.beta_end"] = number("schedule.beta_end", [](RunConfig& c) -> double& { return c.schedule.beta_end; });

    t["timetravel.mode"] = [](RunConfig& c, std::string_view v, int line) {
      if (v == "jump") {
        c.timetravel.mode = ScheduleFamily::Jump;
      } else if (v == "slowdown") {
        c.timetravel.mode = ScheduleFamily::Slowdown;
      } else if (v == "sdedit") {
        c.timetravel.mode = ScheduleFamily::Sdedit;
      } else {
        throw ConfigError(line, "timetravel.mode must be jump, slowdown or sdedit");
      }
    };
    t["timetravel.jump_length"] = number("timetravel.jump_length", [](RunConfig& c) -> int& { return c.timetravel.jump_length; });
    t["timetravel.resamplings"] = number("timetravel.resamplings", [](RunConfig& c) -> int& { return c.timetravel.resamplings; });
    t["timetravel.slowdown_factor"] = number("timetravel.slowdown_factor", [](RunConfig& c) -> int& { return c.timetravel.slowdown_factor; });
    t["timetravel.sdedit_repeats"] = number("timetravel.sdedit_repeats", [](RunConfig& c) -> int& { return c.timetravel.sdedit_repeats; });

    t["sampler.sigma_mode"] = [](RunConfig& c, std::string_view v, int line) {
      c.sampler.sigma_mode = parse_enum<SigmaMode>(v, line, parse_sigma_mode);
    };
    t["sampler.paste_final_known"] = [](RunConfig& c, std::string_view v, int line) {
      c.sampler.paste_final_known = parse_bool(v, line, "sampler.paste_final_known");
    };
    t["sampler.record_trace"] = [](RunConfig& c, std::string_view v, int line) {
      c.sampler.record_trace = parse_bool(v, line, "sampler.record_trace");
    };

    t["denoiser.kind"] = [](RunConfig& c, std::string_view v, int line) {
      if (v != "analytic" && v != "mlp") throw ConfigError(line, "denoiser.kind must be analytic or mlp");
      c.denoiser.kind = v;
    };
    t["denoiser.prior"] = [](RunConfig& c, std::string_view v, int line) {
      if (v != "toy_image" && v != "gaussian2d") throw ConfigError(line, "denoiser.prior must be toy_image or gaussian2d");
      c.denoiser.prior = v;
    };
    t["denoiser.checkpoint"] = [](RunConfig& c, std::string_view v, int) { c.denoiser.checkpoint = v; };
    t["denoiser.rho"] = number("denoiser.rho", [](RunConfig& c) -> double& { return c.denoiser.rho; });

    t["mask.family"] = [](RunConfig& c, std::string_view v, int line) {
      c.mask.family = parse_enum<MaskFamily>(v, line, parse_mask_family);
    };
    t["mask.crop"] = number("mask.crop", [](RunConfig& c) -> int& { return c.mask.crop; });
    t["mask.stride"] = number("mask.stride", [](RunConfig& c) -> int& { return c.mask.stride; });
    t["mask.seed"] = number("mask.seed", [](RunConfig& c) -> std::uint64_t& { return c.mask.seed; });

    t["data.height"] = number("data.height", [](RunConfig& c) -> int& { return c.data.height; });
    t["data.width"] = number("data.width", [](RunConfig& c) -> int& { return c.data.width; });
    t["data.lo"] = number("data.lo", [](RunConfig& c) -> double& { return c.data.lo; });
    t["data.hi"] = number("data.hi", [](RunConfig& c) -> double& { return c.data.hi; });
    t["data.input"] = [](RunConfig& c, std::string_view v, int) { c.data.input = v; };

    t["run.seed"] = number("run.seed", [](RunConfig& c) -> std::uint64_t& { return c.run.seed; });
    t["run.samples"] = number("run.samples", [](RunConfig& c) -> int& { return c.run.samples; });
    t["run.output_dir"] = [](RunConfig& c, std::string_view v, int) { c.run.output_dir = v; };

    t["train.steps"] = number("train.steps", [](RunConfig& c) -> int& { return c.train.steps; });
    t["train.batch"] = number("train.batch", [](RunConfig& c) -> int& { return c.train.batch; });
    t["train.learning_rate"] = number("train.learning_rate", [](RunConfig& c) -> double& { return c.train.learning_rate; });
    t["train.momentum"] = number("train.momentum", [](RunConfig& c) -> double& { return c.train.momentum; });
    t["train.hidden"] = [](RunConfig& c, std::string_view v, int line) {
      c.train.hidden = parse_int_list(v, line, "train.hidden");
    };
    t["train.dataset"] = [](RunConfig& c, std::string_view v, int line) {
      if (v != "two_moons" && v != "prior") throw ConfigError(line, "train.dataset must be two_moons or prior");
      c.train.dataset = v;
    };
    t["train.log_every"] = number("train.log_every", [](RunConfig& c) -> int& { return c.train.log_every; });

    t["ablate.chains"] = number("ablate.chains", [](RunConfig& c) -> int& { return c.ablate.chains; });
    t["ablate.seeds"] = number("ablate.seeds", [](RunConfig& c) -> int& { return c.ablate.seeds; });
    t["ablate.jump_lengths"] = [](RunConfig& c, std::string_view v, int line) {
      c.ablate.jump_lengths = parse_int_list(v, line, "ablate.jump_lengths");
    };
    t["ablate.resamplings"] = [](RunConfig& c, std::string_view v, int line) {
      c.ablate.resamplings = parse_int_list(v, line, "ablate.resamplings");
    };
    return t;
  }();
  return table;
}

int origin(const RunConfig& c, std::initializer_list<std::string_view> keys) {
  int line = 0;
  for (auto k : keys) {
    if (auto it = c.origins.find(k); it != c.origins.end()) line = std::max(line, it->second);
  }
  return line;
}

void require(bool ok, const RunConfig& c, std::initializer_list<std::string_view> keys, const std::string& message) {
  if (!ok) throw ConfigError(origin(c, keys), message);
}

void assign(RunConfig& config, std::string_view dotted_key, std::string_view value, int line) {
  const auto& table = setters();
  const auto it = table.find(dotted_key);
  if (it == table.end()) throw ConfigError(line, "unknown key '" + std::string(dotted_key) + "'");
  it->second(config, value, line);
  config.origins[std::string(dotted_key)] = line;
}

}  // namespace

void validate_config(const RunConfig& c) {
  const auto& s = c.schedule;
  require(s.steps >= 1, c, {"schedule.steps"}, "schedule.steps must be >= 1");
  if (s.kind == ScheduleKind::Linear) {
    const double scale = 1000.0 / s.steps;
    require(s.beta_start > 0.0 && s.beta_start <= s.beta_end && s.beta_end * scale < 1.0, c,
            {"schedule.steps", "schedule.beta_start", "schedule.beta_end"},
            "linear schedule endpoints must satisfy 0 < beta_start <= beta_end and beta_end * 1000 / T < 1");
  }
  const auto& tt = c.timetravel;
  require(tt.jump_length >= 1, c, {"timetravel.jump_length"}, "timetravel.jump_length must be >= 1");
  require(tt.resamplings >= 1, c, {"timetravel.resamplings"}, "timetravel.resamplings must be >= 1");
  require(tt.slowdown_factor >= 1, c, {"timetravel.slowdown_factor"}, "timetravel.slowdown_factor must be >= 1");
  require(tt.sdedit_repeats >= 1, c, {"timetravel.sdedit_repeats"}, "timetravel.sdedit_repeats must be >= 1");
  if (tt.mode == ScheduleFamily::Jump) {
    require(tt.jump_length < s.steps, c, {"timetravel.jump_length", "schedule.steps"},
            "timetravel.jump_length must be < schedule.steps");
  }
  if (tt.mode == ScheduleFamily::Sdedit) {
    require(s.steps % 2 == 0, c, {"schedule.steps", "timetravel.mode"}, "sdedit mode needs an even schedule.steps");
  }
  require(std::abs(c.denoiser.rho) < 1.0, c, {"denoiser.rho"}, "denoiser.rho must be in (-1, 1)");
  require(c.data.height >= 1 && c.data.width >= 1, c, {"data.height", "data.width"}, "data dimensions must be >= 1");
  require(c.data.lo < c.data.hi, c, {"data.lo", "data.hi"}, "data.lo must be < data.hi");
  require(c.mask.crop >= 1, c, {"mask.crop"}, "mask.crop must be >= 1");
  if (c.mask.family == MaskFamily::Expand && c.denoiser.prior == "toy_image") {
    require(c.mask.crop <= std::min(c.data.height, c.data.width), c, {"mask.crop", "data.height", "data.width"},
            "mask.crop exceeds the image size");
  }
  require(c.mask.stride >= 2, c, {"mask.stride"}, "mask.stride must be >= 2");
  require(c.run.samples >= 1, c, {"run.samples"}, "run.samples must be >= 1");
  require(c.train.steps >= 1 && c.train.batch >= 1, c, {"train.steps", "train.batch"},
          "train.steps and train.batch must be >= 1");
  require(c.train.learning_rate >= 0.0, c, {"train.learning_rate"}, "train.learning_rate must be >= 0");
  require(c.train.momentum >= 0.0 && c.train.momentum < 1.0, c, {"train.momentum"}, "train.momentum must be in [0, 1)");
  for (int h : c.train.hidden) require(h >= 1, c, {"train.hidden"}, "train.hidden sizes must be >= 1");
  require(c.train.log_every >= 1, c, {"train.log_every"}, "train.log_every must be >= 1");
  require(c.ablate.chains >= 1000, c, {"ablate.chains"}, "ablate.chains must be >= 1000");
  require(c.ablate.seeds >= 1, c, {"ablate.seeds"}, "ablate.seeds must be >= 1");
  for (int v : c.ablate.jump_lengths) require(v >= 1, c, {"ablate.jump_lengths"}, "jump lengths must be >= 1");
  for (int v : c.ablate.resamplings) require(v >= 1, c, {"ablate.resamplings"}, "resamplings must be >= 1");
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::string section;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);

    if (const auto comment = line.find_first_of("#;"); comment != std::string_view::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const char* known[] = {"schedule", "timetravel", "sampler", "denoiser", "mask",
                                    "data",     "run",        "train",   "ablate"};
      if (std::find(std::begin(known), std::end(known), section) == std::end(known)) {
        throw ConfigError(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = strip_quotes(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (section.empty()) throw ConfigError(line_no, "key '" + std::string(key) + "' outside any section");
    assign(config, section + "." + std::string(key), value, line_no);
  }
  validate_config(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void apply_setting(RunConfig& config, std::string_view dotted_key, std::string_view value, int line) {
  assign(config, dotted_key, value, line);
}

std::string format_config(const RunConfig& c) {
  const auto list = [](const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
  };
  std::ostringstream out;
  out.precision(17);
  out << "[schedule]\nkind = " << to_string(c.schedule.kind) << "\nsteps = " << c.schedule.steps
      << "\nbeta_start = " << c.schedule.beta_start << "\nbeta_end = " << c.schedule.beta_end << "\n\n";
  out << "[timetravel]\nmode = " << to_string(c.timetravel.mode) << "\njump_length = " << c.timetravel.jump_length
      << "\nresamplings = " << c.timetravel.resamplings << "\nslowdown_factor = " << c.timetravel.slowdown_factor
      << "\nsdedit_repeats = " << c.timetravel.sdedit_repeats << "\n\n";
  out << "[sampler]\nsigma_mode = " << to_string(c.sampler.sigma_mode)
      << "\npaste_final_known = " << (c.sampler.paste_final_known ? "true" : "false")
      << "\nrecord_trace = " << (c.sampler.record_trace ? "true" : "false") << "\n\n";
  out << "[denoiser]\nkind = " << c.denoiser.kind << "\nprior = " << c.denoiser.prior << "\ncheckpoint = \""
      << c.denoiser.checkpoint << "\"\nrho = " << c.denoiser.rho << "\n\n";
  out << "[mask]\nfamily = " << to_string(c.mask.family) << "\ncrop = " << c.mask.crop << "\nstride = " << c.mask.stride
      << "\nseed = " << c.mask.seed << "\n\n";
  out << "[data]\nheight = " << c.data.height << "\nwidth = " << c.data.width << "\nlo = " << c.data.lo
      << "\nhi = " << c.data.hi << "\ninput = \"" << c.data.input << "\"\n\n";
  out << "[run]\nseed = " << c.run.seed << "\nsamples = " << c.run.samples << "\noutput_dir = \"" << c.run.output_dir
      << "\"\n\n";
  out << "[train]\nsteps = " << c.train.steps << "\nbatch = " << c.train.batch
      << "\nlearning_rate = " << c.train.learning_rate << "\nmomentum = " << c.train.momentum
      << "\nhidden = " << list(c.train.hidden) << "\ndataset = " << c.train.dataset
      << "\nlog_every = " << c.train.log_every << "\n\n";
  out << "[ablate]\nchains = " << c.ablate.chains << "\nseeds = " << c.ablate.seeds
      << "\njump_lengths = " << list(c.ablate.jump_lengths) << "\nresamplings = " << list(c.ablate.resamplings) << "\n";
  return out.str();
}

}  // namespace repaint
