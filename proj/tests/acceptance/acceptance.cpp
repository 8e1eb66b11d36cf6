// Acceptance suite: one PASS/FAIL line per criterion. Tolerances and
// budgets are fixed below; `--only N` runs a single criterion.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "repaint/datasets.hpp"
#include "repaint/eval.hpp"
#include "repaint/gaussian_mixture.hpp"
#include "repaint/masks.hpp"
#include "repaint/mlp.hpp"
#include "repaint/sampler.hpp"
#include "repaint/schedule.hpp"
#include "repaint/timetravel.hpp"
#include "support/oracles.hpp"

using namespace repaint;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// 1. Composed single steps vs. one-shot noising.

Outcome schedule_moments() {
  constexpr int kSteps = 50;
  constexpr std::size_t kTrials = 100000;
  constexpr double kTol = 0.01;
  constexpr double kTimeLimit = 10.0;

  Stopwatch clock;
  const auto sched = build_linear_schedule(kSteps);
  Rng rng(101);
  // Shared clean data: N(1, 0.5^2).
  Tensor x0 = normal_tensor({kTrials, 1}, rng);
  for (double& v : x0.values()) v = 1.0 + 0.5 * v;

  bool pass = true;
  std::ostringstream detail;
  for (int t : {1, kSteps / 2, kSteps}) {
    Tensor x = x0;
    for (int s = 1; s <= t; ++s) x = forward_step(x, s, normal_tensor({kTrials, 1}, rng), sched);
    const Tensor y = forward_sample(x0, t, normal_tensor({kTrials, 1}, rng), sched);

    const auto a = oracle::moments(std::vector<double>(x.values().begin(), x.values().end()));
    const auto b = oracle::moments(std::vector<double>(y.values().begin(), y.values().end()));
    // The mean approaches 0 at t = T, so its error is taken relative to the
    // root-mean-square scale of the one-shot samples.
    const double rms = std::sqrt(b.var + b.mean * b.mean);
    const double mean_rel = std::abs(a.mean - b.mean) / rms;
    const double var_rel = std::abs(a.var - b.var) / b.var;
    pass = pass && mean_rel <= kTol && var_rel <= kTol;
    detail << "t=" << t << " mean " << fmt(mean_rel) << " var " << fmt(var_rel) << "; ";
  }
  const double secs = clock.seconds();
  pass = pass && secs < kTimeLimit;
  detail << "tol " << kTol << ", " << fmt(secs, 3) << " s";
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 2. Jump schedule vs. a direct pseudo-code transcription.

Outcome jump_schedule_golden() {
  Stopwatch clock;
  std::size_t cases = 0, mismatches = 0;
  auto check = [&](int T, int j, int r) {
    ++cases;
    if (generate_jump_schedule(T, j, r).times != oracle::jump_schedule(T, j, r)) ++mismatches;
  };
  for (int T = 1; T <= 20; ++T) {
    for (int j = 1; j <= 5; ++j) {
      for (int r = 1; r <= 4; ++r) check(T, j, r);
    }
  }
  check(250, 10, 10);
  const auto big = generate_jump_schedule(250, 10, 10);
  const double secs = clock.seconds();
  const bool pass = mismatches == 0 && secs < 5.0;
  return {pass, std::to_string(cases) + " cases, " + std::to_string(mismatches) + " mismatches, T=250 j=10 r=10 has " +
                    std::to_string(big.times.size()) + " positions, " + fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------------------
// 3. Oracle denoiser optimality on a 1-D standard normal prior.

Outcome oracle_optimality() {
  constexpr int kSteps = 50;
  constexpr std::size_t kSamples = 100000;
  constexpr double kQuadTol = 1e-6;
  const auto sched = build_linear_schedule(kSteps);
  const auto prior = GaussianMixturePrior::single(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  Rng rng(303);

  bool pass = true;
  std::ostringstream detail;
  int losses_ok = 0, losses_total = 0;
  for (int t : {1, 10, 20, 30, 40, 50}) {
    const auto x0 = prior.sample(kSamples, rng);
    const auto eps = normal_tensor({kSamples, 1}, rng);
    const auto x_t = forward_sample(x0, t, eps, sched);
    const auto hat = gm_predict_eps(prior, x_t, t, sched);
    double oracle_loss = 0, zero_loss = 0, scaled_loss = 0;
    for (std::size_t i = 0; i < kSamples; ++i) {
      oracle_loss += (eps[i] - hat[i]) * (eps[i] - hat[i]);
      zero_loss += eps[i] * eps[i];
      scaled_loss += (eps[i] - 0.5 * x_t[i]) * (eps[i] - 0.5 * x_t[i]);
    }
    ++losses_total;
    if (oracle_loss < zero_loss && oracle_loss < scaled_loss) ++losses_ok;
  }
  pass = losses_ok == losses_total;
  detail << "L_simple lowest at " << losses_ok << "/" << losses_total << " t; ";

  double worst_quad = 0.0, worst_impl = 0.0;
  for (int t : {1, 10, 25, 50}) {
    const double abar = sched.alpha_bar(t);
    for (double x : {-3.0, -1.2, -0.1, 0.0, 0.4, 1.7, 3.0}) {
      const double closed = std::sqrt(1 - abar) * x;
      worst_quad = std::max(worst_quad, std::abs(closed - oracle::quadrature_eps({{1.0, 0.0, 1.0}}, x, abar)));
      worst_impl = std::max(worst_impl, std::abs(closed - gm_predict_eps(prior, Tensor({1, 1}, {x}), t, sched)[0]));
    }
  }
  pass = pass && worst_quad < kQuadTol && worst_impl < kQuadTol;
  detail << "closed form vs quadrature " << fmt(worst_quad, 3) << ", vs implementation " << fmt(worst_impl, 3);
  return {pass, detail.str()};
}

// ---------------------------------------------------------------------------
// 4. Conditional moments against closed-form Gaussian conditioning.

Outcome exact_conditioning() {
  constexpr int kSteps = 50, kJump = 5, kResample = 5;
  constexpr std::size_t kChains = 100000;
  constexpr double kTol = 0.03;
  constexpr double kTimeLimit = 300.0;
  constexpr double kRho = 0.8, kKnown = 1.5;
  // x1 | x0 = a  ~  N(rho a, 1 - rho^2) for unit variances.
  const double exact_mean = kRho * kKnown;
  const double exact_var = 1.0 - kRho * kRho;

  Stopwatch clock;
  const auto bench = default_gaussian_benchmark();
  const GaussianMixtureDenoiser model(bench.prior);
  const auto sched = benchmark_schedule(bench, kSteps);
  Rng rng(404);
  const auto result = repaint_inpaint(model, sched, generate_jump_schedule(kSteps, kJump, kResample), bench.x_known,
                                      bench.mask, kChains, bench.sampler, rng);
  std::vector<double> unknown(kChains);
  for (std::size_t i = 0; i < kChains; ++i) unknown[i] = result.samples.row(i)[1];
  const auto m = oracle::moments(unknown);
  const double mean_rel = std::abs(m.mean - exact_mean) / exact_mean;
  const double var_rel = std::abs(m.var - exact_var) / exact_var;
  const double secs = clock.seconds();
  const bool pass = mean_rel <= kTol && var_rel <= kTol && secs < kTimeLimit;
  return {pass, "mean " + fmt(m.mean) + " vs " + fmt(exact_mean) + " (" + fmt(100 * mean_rel, 3) + "%), var " +
                    fmt(m.var) + " vs " + fmt(exact_var) + " (" + fmt(100 * var_rel, 3) + "%), tol 3%, " +
                    fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------------------
// 5-7. Matched-NFE trends on the same benchmark, 20 seeds.

GaussianBenchmark trend_benchmark() {
  auto bench = default_gaussian_benchmark();
  bench.seeds.clear();
  for (std::uint64_t s = 0; s < 20; ++s) bench.seeds.push_back(s);
  return bench;
}

Outcome compare(const SettingSummary& ours, const SettingSummary& other) {
  const bool pass = ours.nfe == other.nfe && ours.seeds >= 20 && ours.mean_err < other.mean_err;
  return {pass, ours.setting.label() + " mean_err " + fmt(ours.mean_err) + " vs " + other.setting.label() +
                    " mean_err " + fmt(other.mean_err) + " at NFE " + std::to_string(ours.nfe) + "/" +
                    std::to_string(other.nfe) + " (cov_err " + fmt(ours.cov_err) + " vs " + fmt(other.cov_err) +
                    "), " + std::to_string(ours.seeds) + " seeds"};
}

Outcome resample_beats_slowdown() {
  const ResampleBudget budget{50, 10, 6, 5};
  const auto report = run_resample_vs_slowdown(trend_benchmark(), std::span(&budget, 1));
  const auto rows = report.summarize();
  return compare(rows.at(0), rows.at(1));
}

Outcome longer_jumps_win() {
  const SettingSpec settings[] = {
      {.family = ScheduleFamily::Jump, .steps = 25, .jump_length = 5, .resamplings = 7},
      {.family = ScheduleFamily::Jump, .steps = 25, .jump_length = 1, .resamplings = 6},
  };
  const auto rows = run_settings(trend_benchmark(), settings, "jump length at fixed NFE").summarize();
  return compare(rows.at(0), rows.at(1));
}

Outcome resample_beats_sdedit() {
  const auto rows = run_sdedit_comparison(trend_benchmark(), 50, 10, 6, 9).summarize();
  return compare(rows.at(0), rows.at(1));
}

// ---------------------------------------------------------------------------
// 8. Finite-difference gradient check.

Outcome gradient_check() {
  constexpr double kTol = 1e-4;
  double worst = 0.0;
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    Rng rng(seed);
    const auto model = MlpDenoiser::random(2, {2}, rng);
    const auto x_t = normal_tensor({16, 2}, rng);
    const auto eps = normal_tensor({16, 2}, rng);
    std::vector<int> times;
    std::uniform_int_distribution<int> pick(1, 100);
    for (int i = 0; i < 16; ++i) times.push_back(pick(rng));
    worst = std::max(worst, oracle::max_gradient_rel_error(model, x_t, times, eps, 1e-5));
  }
  return {worst < kTol, "max relative error " + fmt(worst, 3) + " over 5 random 2-2-2 nets, tol 1e-4"};
}

// ---------------------------------------------------------------------------
// 9. Mask generators and paste-back exactness.

template <typename Rule>
bool matches_rule(const Mask& m, Rule rule) {
  for (std::size_t r = 0; r < m.height(); ++r) {
    for (std::size_t c = 0; c < m.width(); ++c) {
      if (m.known(r, c) != rule(r, c)) return false;
    }
  }
  return true;
}

Outcome mask_exactness() {
  std::vector<std::string> failures;
  const std::pair<std::size_t, std::size_t> sizes[] = {{2, 2}, {7, 9}, {8, 8}, {16, 11}, {64, 64}};
  for (auto [h, w] : sizes) {
    const auto tag = std::to_string(h) + "x" + std::to_string(w);
    if (!matches_rule(mask_half(h, w), [&](auto, auto c) { return c < w / 2; })) failures.push_back("half " + tag);
    const std::size_t crop = std::min(h, w) / 2 + 1;
    const std::size_t r0 = (h - crop) / 2, c0 = (w - crop) / 2;
    if (!matches_rule(mask_expand(h, w, crop),
                      [&](auto r, auto c) { return r >= r0 && r < r0 + crop && c >= c0 && c < c0 + crop; })) {
      failures.push_back("expand " + tag);
    }
    if (!matches_rule(mask_alternating_lines(h, w), [](auto r, auto) { return r % 2 == 0; })) {
      failures.push_back("lines " + tag);
    }
    for (std::size_t s : {2, 3}) {
      if (!matches_rule(mask_super_resolution(h, w, s), [&](auto r, auto c) { return r % s == 0 && c % s == 0; })) {
        failures.push_back("sr" + std::to_string(s) + " " + tag);
      }
    }
  }
  if (mask_brush(64, 64, BrushKind::Wide, 42).hash() != 15928478291919629618ULL) failures.push_back("wide pin");
  if (mask_brush(64, 64, BrushKind::Narrow, 7).hash() != 6648018568911134103ULL) failures.push_back("narrow pin");
  for (BrushKind kind : {BrushKind::Wide, BrushKind::Narrow}) {
    const auto params = default_brush_params(kind);
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      const double cov = mask_brush(64, 64, kind, seed).unknown_fraction();
      inside += cov >= params.coverage_lo && cov <= params.coverage_hi;
    }
    if (inside < 990) failures.push_back(std::string(kind == BrushKind::Wide ? "wide" : "narrow") + " coverage " +
                                         std::to_string(inside) + "/1000");
  }

  // Paste-back: known pixels of every output equal the input bit for bit.
  const GaussianMixtureDenoiser model(toy_image_prior(8, 8));
  const auto sched = build_cosine_schedule(20);
  Rng rng(909);
  const Tensor truth = toy_image_prior(8, 8).sample(1, rng).reshaped({1, 8, 8});
  std::size_t pasted = 0;
  for (const Mask& mask : {mask_half(8, 8), mask_brush(8, 8, BrushKind::Wide, 3), mask_super_resolution(8, 8, 2)}) {
    const Tensor m = mask.to_tensor(1);
    const auto result = repaint_inpaint(model, sched, generate_jump_schedule(20, 4, 3), truth, m, 6, SamplerConfig{}, rng);
    for (std::size_t i = 0; i < 6; ++i) {
      const auto row = result.samples.row(i);
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (m[k] != 1.0) continue;
        ++pasted;
        const double want = truth[k];
        if (std::memcmp(&row[k], &want, sizeof(double)) != 0) {
          failures.push_back("paste-back");
          break;
        }
      }
    }
  }

  std::string detail = failures.empty() ? "all generators match; " + std::to_string(pasted) + " pasted values bit-equal"
                                        : "failed:";
  for (const auto& f : failures) detail += " " + f;
  return {failures.empty(), detail};
}

// ---------------------------------------------------------------------------
// 10. Two identical CLI runs produce identical files.

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<fs::path> relative_files(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), root));
  }
  std::sort(files.begin(), files.end());
  return files;
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "repaint_acceptance_determinism";
  fs::remove_all(base);
  // Both runs use the identical command line (the output directory is part of
  // the recorded config); the first result is moved aside before the rerun.
  const fs::path out = base / "run";
  const std::vector<fs::path> dirs{base / "first", base / "second"};
  const std::string cmd = std::string("\"") + REPAINT_CLI + "\" inpaint --config \"" + REPAINT_SOURCE_DIR +
                          "/configs/toy_inpaint.cfg\" --set sampler.record_trace=true --set run.output_dir=\"" +
                          out.string() + "\" > /dev/null";
  for (const auto& dir : dirs) {
    if (std::system(cmd.c_str()) != 0) return {false, "CLI run failed: " + cmd};
    fs::rename(out, dir);
  }
  const auto files = relative_files(dirs[0]);
  if (files != relative_files(dirs[1])) return {false, "the two runs wrote different file sets"};
  std::uintmax_t bytes = 0;
  for (const auto& f : files) {
    const auto a = read_bytes(dirs[0] / f);
    if (a != read_bytes(dirs[1] / f)) return {false, f.string() + " differs between runs"};
    bytes += a.size();
  }
  fs::remove_all(base);
  return {!files.empty(), std::to_string(files.size()) + " files, " + std::to_string(bytes) + " bytes identical"};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  int only = 0;
  app.add_option("--only", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria{
      {1, "schedule composition", schedule_moments},
      {2, "jump schedule golden", jump_schedule_golden},
      {3, "oracle optimality", oracle_optimality},
      {4, "exact conditioning", exact_conditioning},
      {5, "resampling beats slow-down", resample_beats_slowdown},
      {6, "j=5 beats j=1", longer_jumps_win},
      {7, "resampling beats SDEdit", resample_beats_sdedit},
      {8, "gradient check", gradient_check},
      {9, "mask exactness", mask_exactness},
      {10, "determinism", determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    failed += outcome.pass ? 0 : 1;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " C" << c.id << " " << c.name << ": " << outcome.detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
