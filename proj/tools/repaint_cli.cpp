#include <CLI11.hpp>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "commands.hpp"
#include "repaint/config.hpp"
#include "repaint/error.hpp"

namespace {

// 0 success (including --help), 1 usage or configuration error, 2 failure
// while running a command.
constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

struct ConfigOptions {
  std::string path;
  std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigOptions& opts) {
  cmd->add_option("-c,--config", opts.path, "Config file with [section] headers and key = value lines")
      ->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", opts.overrides, "Override one key as section.key=value; repeatable, last wins")
      ->allow_extra_args(false);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

repaint::RunConfig resolve_config(const ConfigOptions& opts) {
  repaint::RunConfig config = opts.path.empty() ? repaint::RunConfig{} : repaint::load_config(opts.path);
  for (const auto& item : opts.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw repaint::ConfigError(0, "override '" + item + "' is not section.key=value");
    const std::string_view view(item);
    repaint::apply_setting(config, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
  }
  repaint::validate_config(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace repaint;

  CLI::App app{"Mask-conditioned diffusion sampling with resampling schedules"};
  app.require_subcommand(1);

  ConfigOptions opts;
  std::function<void(const RunConfig&)> action;

  auto* train = app.add_subcommand("train", "Train an MLP noise predictor and write a checkpoint");
  add_config_options(train, opts);
  train->callback([&] { action = cli::run_train; });

  auto* sample = app.add_subcommand("sample", "Draw unconditional samples");
  add_config_options(sample, opts);
  sample->callback([&] { action = cli::run_sample; });

  auto* inpaint = app.add_subcommand("inpaint", "Inpaint the unknown region of one input");
  add_config_options(inpaint, opts);
  inpaint->callback([&] { action = cli::run_inpaint; });

  std::string mask_out;
  auto* gen_mask = app.add_subcommand("gen-mask", "Write the configured mask as a PNG");
  add_config_options(gen_mask, opts);
  gen_mask->add_option("-o,--out", mask_out, "Output PNG (default: <run.output_dir>/mask.png)");
  gen_mask->callback([&] { action = [&](const RunConfig& c) { cli::run_gen_mask(c, mask_out); }; });

  std::string schedule_out;
  auto* dump = app.add_subcommand("dump-schedule", "Print the time schedule, one position per line");
  add_config_options(dump, opts);
  dump->add_option("-o,--out", schedule_out, "Output file (default: stdout); the summary goes to stderr");
  dump->callback([&] { action = [&](const RunConfig& c) { cli::run_dump_schedule(c, schedule_out); }; });

  std::string study;
  const std::map<std::string, cli::AblationKind> studies{{"resample-vs-slowdown", cli::AblationKind::ResampleVsSlowdown},
                                                         {"jump-grid", cli::AblationKind::JumpGrid},
                                                         {"sdedit", cli::AblationKind::Sdedit}};
  auto* ablate = app.add_subcommand("ablate", "Run a schedule ablation on the 2-D Gaussian benchmark");
  add_config_options(ablate, opts);
  ablate->add_option("study", study, "resample-vs-slowdown | jump-grid | sdedit")
      ->required()
      ->check(CLI::IsMember({"resample-vs-slowdown", "jump-grid", "sdedit"}));
  ablate->callback([&] { action = [&](const RunConfig& c) { cli::run_ablate(c, studies.at(study)); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    const RunConfig config = resolve_config(opts);
    action(config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return 0;
}
