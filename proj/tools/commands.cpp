#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <variant>

#include "repaint/datasets.hpp"
#include "repaint/error.hpp"
#include "repaint/eval.hpp"
#include "repaint/gaussian_mixture.hpp"
#include "repaint/mlp.hpp"
#include "repaint/png_io.hpp"
#include "repaint/sampler.hpp"
#include "repaint/tensor_io.hpp"
#include "repaint/timetravel.hpp"

namespace fs = std::filesystem;

namespace repaint::cli {
namespace {

// Independent generator streams derived from run.seed.
enum class Stream : std::uint32_t { Truth = 1, Sampler = 2, Train = 3 };

constexpr double kMoonsNoise = 0.05;

Rng make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

fs::path prepare_output_dir(const RunConfig& c) {
  const fs::path dir = c.run.output_dir;
  fs::create_directories(dir);
  open_output(dir / "config.cfg") << format_config(c);
  return dir;
}

NoiseSchedule make_noise_schedule(const ScheduleSettings& s, int steps) {
  return s.kind == ScheduleKind::Cosine ? build_cosine_schedule(steps)
                                        : build_linear_schedule(steps, s.beta_start, s.beta_end);
}

GaussianMixturePrior make_prior(const RunConfig& c) {
  if (c.denoiser.prior == "gaussian2d") return correlated_gaussian_2d(c.denoiser.rho);
  return toy_image_prior(static_cast<std::size_t>(c.data.height), static_cast<std::size_t>(c.data.width));
}

struct Problem {
  std::unique_ptr<DenoiserModel> model;
  std::size_t dim = 0;
  bool image = false;
  Shape shape;
};

// Image-shaped data is [1, h, w]; anything else is a flat vector.
Problem make_problem(const RunConfig& c) {
  Problem p;
  if (c.denoiser.kind == "mlp") {
    if (c.denoiser.checkpoint.empty()) throw ConfigError(0, "denoiser.kind = mlp needs denoiser.checkpoint");
    auto mlp = std::make_unique<MlpDenoiser>(load_checkpoint(c.denoiser.checkpoint));
    p.dim = mlp->data_dim();
    p.model = std::move(mlp);
  } else {
    auto prior = make_prior(c);
    p.dim = prior.dim();
    p.model = std::make_unique<GaussianMixtureDenoiser>(std::move(prior));
  }
  const auto h = static_cast<std::size_t>(c.data.height), w = static_cast<std::size_t>(c.data.width);
  p.image = c.denoiser.prior == "toy_image" && p.dim == h * w;
  p.shape = p.image ? Shape{1, h, w} : Shape{p.dim};
  return p;
}

Mask make_mask(const RunConfig& c, std::size_t h, std::size_t w) {
  switch (c.mask.family) {
    case MaskFamily::Half:
      return mask_half(h, w);
    case MaskFamily::Expand:
      return mask_expand(h, w, static_cast<std::size_t>(c.mask.crop));
    case MaskFamily::AlternatingLines:
      return mask_alternating_lines(h, w);
    case MaskFamily::SuperResolution:
      return mask_super_resolution(h, w, static_cast<std::size_t>(c.mask.stride));
    case MaskFamily::Wide:
      return mask_brush(h, w, BrushKind::Wide, c.mask.seed);
    case MaskFamily::Narrow:
      return mask_brush(h, w, BrushKind::Narrow, c.mask.seed);
  }
  throw ValueError("unhandled mask family");
}

// Vector data is treated as a single-row image, so `half` keeps the leading
// coordinates.
Mask problem_mask(const RunConfig& c, const Problem& p) {
  if (p.image) return make_mask(c, static_cast<std::size_t>(c.data.height), static_cast<std::size_t>(c.data.width));
  return make_mask(c, 1, p.dim);
}

Tensor ground_truth(const RunConfig& c, const Problem& p) {
  Tensor truth;
  if (!c.data.input.empty()) {
    truth = load_tensor(c.data.input);
  } else {
    Rng rng = make_rng(c.run.seed, Stream::Truth);
    if (c.denoiser.kind == "mlp" && c.train.dataset == "two_moons") {
      truth = two_moons(1, kMoonsNoise, rng);
    } else {
      truth = make_prior(c).sample(1, rng);
    }
  }
  if (truth.size() != p.dim) {
    throw ShapeError("ground truth has " + std::to_string(truth.size()) + " values, the denoiser expects " +
                     std::to_string(p.dim) + "; set data.input to a matching tensor file");
  }
  return truth.reshaped(p.shape);
}

struct SamplingPlan {
  NoiseSchedule sched;
  std::variant<TimeSchedule, SdeditPlan> drive;
};

SamplingPlan make_plan(const RunConfig& c) {
  const int steps = c.schedule.steps;
  const auto& tt = c.timetravel;
  switch (tt.mode) {
    case ScheduleFamily::Jump:
      return {make_noise_schedule(c.schedule, steps), generate_jump_schedule(steps, tt.jump_length, tt.resamplings)};
    case ScheduleFamily::Slowdown: {
      auto plan = generate_slowdown_schedule(steps, tt.slowdown_factor);
      return {make_noise_schedule(c.schedule, plan.steps), std::move(plan.schedule)};
    }
    case ScheduleFamily::Sdedit:
      return {make_noise_schedule(c.schedule, steps), generate_sdedit_schedule(steps, tt.sdedit_repeats)};
  }
  throw ValueError("unhandled schedule mode");
}

Tensor sample_row(const Tensor& batch, std::size_t i, const Shape& shape) {
  const auto row = batch.row(i);
  return Tensor(shape, std::vector<double>(row.begin(), row.end()));
}

Tensor as_image_batch(const Tensor& t, const Shape& shape) {
  Shape batched{t.size() / (shape[0] * shape[1] * shape[2])};
  batched.insert(batched.end(), shape.begin(), shape.end());
  return t.reshaped(batched);
}

void write_trace(const fs::path& dir, const SampleTrace& trace) {
  const fs::path trace_dir = dir / "trace";
  fs::create_directories(trace_dir);
  for (const auto& frame : trace) {
    // Frame files are named by schedule index and the diffusion time of the
    // latent they hold.
    std::ostringstream name;
    name << "frame_" << std::setw(6) << std::setfill('0') << frame.index << "_t" << std::setw(4)
         << std::setfill('0') << frame.time + 1 << ".rpt";
    save_tensor(trace_dir / name.str(), frame.latent);
  }
}

}  // namespace

void run_inpaint(const RunConfig& c) {
  const fs::path dir = prepare_output_dir(c);
  const Problem p = make_problem(c);
  const Mask mask = problem_mask(c, p);
  const Tensor mask_tensor = mask.to_tensor(1).reshaped(p.shape);
  const Tensor truth = ground_truth(c, p);
  const SamplingPlan plan = make_plan(c);

  Rng rng = make_rng(c.run.seed, Stream::Sampler);
  const auto chains = static_cast<std::size_t>(c.run.samples);
  const SampleResult result = std::visit(
      [&](const auto& drive) { return repaint_inpaint(*p.model, plan.sched, drive, truth, mask_tensor, chains, c.sampler, rng); },
      plan.drive);

  save_tensor(dir / "ground_truth.rpt", truth);
  save_tensor(dir / "samples.rpt", result.samples);
  save_mask_png(mask, dir / "mask.png");
  if (p.image) {
    Tensor masked = truth;
    for (std::size_t i = 0; i < masked.size(); ++i) {
      if (mask_tensor[i] == 0.0) masked[i] = c.data.lo;
    }
    save_image_grid(as_image_batch(truth, p.shape), dir / "input.png", c.data.lo, c.data.hi);
    save_image_grid(as_image_batch(masked, p.shape), dir / "masked_input.png", c.data.lo, c.data.hi);
    save_image_grid(result.samples, dir / "samples.png", c.data.lo, c.data.hi);
  }

  double mse_sum = 0.0;
  {
    auto csv = open_output(dir / "metrics.csv");
    csv << "metric,value\n";
    csv << "nfe," << result.nfe << "\n";
    for (std::size_t i = 0; i < chains; ++i) {
      const double mse = masked_mse(sample_row(result.samples, i, p.shape), truth, mask_tensor);
      mse_sum += mse;
      csv << "masked_mse_" << i << "," << mse << "\n";
    }
    csv << "masked_mse_mean," << mse_sum / static_cast<double>(chains) << "\n";
    if (chains >= 2) csv << "diversity," << diversity_score(result.samples) << "\n";
  }
  if (result.trace) write_trace(dir, *result.trace);

  std::cout << "inpainted " << chains << " sample(s) with " << result.nfe << " denoiser calls per chain; mean masked MSE "
            << mse_sum / static_cast<double>(chains) << "\nwrote " << dir.string() << "\n";
}

void run_sample(const RunConfig& c) {
  const fs::path dir = prepare_output_dir(c);
  const Problem p = make_problem(c);
  const auto sched = make_noise_schedule(c.schedule, c.schedule.steps);
  Rng rng = make_rng(c.run.seed, Stream::Sampler);
  const auto chains = static_cast<std::size_t>(c.run.samples);
  const auto result =
      unconditional_sample(*p.model, sched, descending_schedule(c.schedule.steps), p.shape, chains, c.sampler, rng);

  save_tensor(dir / "samples.rpt", result.samples);
  if (p.image) {
    save_image_grid(result.samples, dir / "samples.png", c.data.lo, c.data.hi);
  } else {
    auto csv = open_output(dir / "samples.csv");
    for (std::size_t i = 0; i < chains; ++i) {
      const auto row = result.samples.row(i);
      for (std::size_t k = 0; k < row.size(); ++k) csv << (k ? "," : "") << row[k];
      csv << "\n";
    }
  }
  if (result.trace) write_trace(dir, *result.trace);
  std::cout << "drew " << chains << " unconditional sample(s) in " << result.nfe << " steps\nwrote " << dir.string()
            << "\n";
}

void run_train(const RunConfig& c) {
  const fs::path dir = prepare_output_dir(c);
  const auto& t = c.train;
  const auto sched = make_noise_schedule(c.schedule, c.schedule.steps);
  Rng rng = make_rng(c.run.seed, Stream::Train);

  const bool moons = t.dataset == "two_moons";
  std::optional<GaussianMixturePrior> prior;
  if (!moons) prior = make_prior(c);
  const std::size_t dim = moons ? 2 : prior->dim();
  const auto batch = static_cast<std::size_t>(t.batch);

  auto model = MlpDenoiser::random(dim, std::vector<std::size_t>(t.hidden.begin(), t.hidden.end()), rng);
  SgdState state;
  const SgdOptions options{t.learning_rate, t.momentum};

  auto log = open_output(dir / "train_loss.csv");
  log << "step,loss\n";
  for (int step = 1; step <= t.steps; ++step) {
    const Tensor x0 = moons ? two_moons(batch, kMoonsNoise, rng) : prior->sample(batch, rng);
    const double loss = train_step(model, x0, sched, options, state, rng).loss;
    if (step % t.log_every == 0 || step == t.steps) {
      log << step << "," << loss << "\n";
      std::cout << "step " << step << " loss " << loss << "\n";
    }
  }

  const fs::path ckpt = c.denoiser.checkpoint.empty() ? dir / "model.ckpt" : fs::path(c.denoiser.checkpoint);
  if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
  save_checkpoint(model, ckpt);
  std::cout << "wrote " << ckpt.string() << " (" << model.parameter_count() << " parameters)\n";
}

void run_gen_mask(const RunConfig& c, const std::string& out_path) {
  const Mask mask = make_mask(c, static_cast<std::size_t>(c.data.height), static_cast<std::size_t>(c.data.width));
  fs::path path = out_path;
  if (path.empty()) {
    fs::create_directories(c.run.output_dir);
    path = fs::path(c.run.output_dir) / "mask.png";
  } else if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  save_mask_png(mask, path);
  std::cout << to_string(mask.provenance().family) << " mask " << mask.height() << "x" << mask.width() << ", known fraction "
            << mask.known_fraction() << ", hash " << mask.hash() << "\nwrote " << path.string() << "\n";
}

void run_dump_schedule(const RunConfig& c, const std::string& out_path) {
  const SamplingPlan plan = make_plan(c);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty() && out_path != "-") {
    file = open_output(out_path);
    out = &file;
  }

  if (const auto* schedule = std::get_if<TimeSchedule>(&plan.drive)) {
    write_schedule_text(*out, *schedule);
    write_schedule_summary(std::cerr, *schedule);
    return;
  }
  // SDEdit plans contain one-shot re-noising jumps, so the positions list is
  // not a unit-step walk.
  const auto& sdedit = std::get<SdeditPlan>(plan.drive);
  *out << sdedit.steps - 1 << "\n";
  for (const auto& tr : sdedit.transitions) *out << tr.to << "\n";
  std::cerr << "sdedit T=" << sdedit.steps << " repeats=" << sdedit.repeats << " transitions=" << sdedit.transitions.size()
            << " reverse=" << sdedit.reverse_count() << "\n";
}

void run_ablate(const RunConfig& c, AblationKind kind) {
  GaussianBenchmark bench = default_gaussian_benchmark();
  bench.prior = correlated_gaussian_2d(c.denoiser.rho);
  bench.schedule_kind = c.schedule.kind;
  bench.beta_start = c.schedule.beta_start;
  bench.beta_end = c.schedule.beta_end;
  bench.sampler = c.sampler;
  bench.sampler.record_trace = false;
  bench.chains = static_cast<std::size_t>(c.ablate.chains);
  bench.seeds.clear();
  for (int i = 0; i < c.ablate.seeds; ++i) bench.seeds.push_back(c.run.seed + static_cast<std::uint64_t>(i));

  const int steps = c.schedule.steps;
  const int j = c.timetravel.jump_length, r = c.timetravel.resamplings;
  AblationReport report;
  switch (kind) {
    case AblationKind::ResampleVsSlowdown: {
      const auto nfe = jump_schedule_nfe(steps, j, r);
      if (nfe % static_cast<std::size_t>(steps) != 0) {
        throw ValueError("jump schedule NFE " + std::to_string(nfe) + " is not a multiple of T = " +
                         std::to_string(steps) + "; no slow-down factor matches it");
      }
      const ResampleBudget budget{steps, j, r, static_cast<int>(nfe / static_cast<std::size_t>(steps))};
      report = run_resample_vs_slowdown(bench, std::span(&budget, 1));
      break;
    }
    case AblationKind::JumpGrid:
      report = run_jump_grid(bench, steps, c.ablate.jump_lengths, c.ablate.resamplings);
      break;
    case AblationKind::Sdedit: {
      // Restart passes cost T/2 each after the initial T/2 descent.
      const auto nfe = jump_schedule_nfe(steps, j, r);
      const auto twice = 2 * nfe;
      if (steps % 2 != 0 || twice % static_cast<std::size_t>(steps) != 0) {
        throw ValueError("jump schedule NFE " + std::to_string(nfe) + " cannot be matched by SDEdit restarts at T = " +
                         std::to_string(steps));
      }
      const int repeats = static_cast<int>(twice / static_cast<std::size_t>(steps)) - 1;
      report = run_sdedit_comparison(bench, steps, j, r, repeats);
      break;
    }
  }

  const fs::path dir = prepare_output_dir(c);
  {
    auto csv = open_output(dir / "ablation.csv");
    report.write_csv(csv);
  }
  {
    auto txt = open_output(dir / "ablation.txt");
    report.write_summary(txt);
  }
  report.write_summary(std::cout);
  std::cout << "wrote " << (dir / "ablation.csv").string() << "\n";
}

}  // namespace repaint::cli
