#include "repaint/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "repaint/error.hpp"

namespace repaint {

double masked_mse(const Tensor& output, const Tensor& reference, const Tensor& mask) {
  require_same_shape(output, reference, "masked_mse");
  const bool broadcast = !mask.same_shape(output);
  if (broadcast && mask.size() != output.row_size()) {
    throw ShapeError("mask shape " + shape_string(mask.shape()) + " matches neither the output nor one sample");
  }
  double total = 0.0;
  std::size_t count = 0;
  const std::size_t width = output.row_size();
  for (std::size_t i = 0; i < output.size(); ++i) {
    const double m = broadcast ? mask[i % width] : mask[i];
    if (m == 0.0) {
      const double d = output[i] - reference[i];
      total += d * d;
      ++count;
    }
  }
  if (count == 0) throw ValueError("masked_mse: mask has no unknown coordinates");
  return total / static_cast<double>(count);
}

GaussianConditional gaussian_conditional(const GaussianMixturePrior& prior, const Tensor& x_known, const Tensor& mask) {
  if (prior.size() != 1) throw ValueError("closed-form conditioning needs a single-Gaussian prior");
  require_same_shape(x_known, mask, "gaussian_conditional");
  if (x_known.size() != prior.dim()) throw ShapeError("known vector does not match prior dimension");
  std::vector<Eigen::Index> known;
  GaussianConditional out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == 1.0) {
      known.push_back(static_cast<Eigen::Index>(i));
    } else if (mask[i] == 0.0) {
      out.unknown.push_back(i);
    } else {
      throw ValueError("mask must be binary");
    }
  }
  const auto& comp = prior.components().front();
  const auto nu = static_cast<Eigen::Index>(out.unknown.size());
  const auto nk = static_cast<Eigen::Index>(known.size());
  Eigen::VectorXd mu_u(nu), mu_k(nk), x_k(nk);
  Eigen::MatrixXd s_uu(nu, nu), s_uk(nu, nk), s_kk(nk, nk);
  for (Eigen::Index a = 0; a < nu; ++a) {
    const auto ia = static_cast<Eigen::Index>(out.unknown[a]);
    mu_u(a) = comp.mean(ia);
    for (Eigen::Index b = 0; b < nu; ++b) s_uu(a, b) = comp.covariance(ia, static_cast<Eigen::Index>(out.unknown[b]));
    for (Eigen::Index b = 0; b < nk; ++b) s_uk(a, b) = comp.covariance(ia, known[b]);
  }
  for (Eigen::Index a = 0; a < nk; ++a) {
    mu_k(a) = comp.mean(known[a]);
    x_k(a) = x_known[static_cast<std::size_t>(known[a])];
    for (Eigen::Index b = 0; b < nk; ++b) s_kk(a, b) = comp.covariance(known[a], known[b]);
  }
  if (nk == 0) {
    out.mean = mu_u;
    out.covariance = s_uu;
    return out;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(s_kk);
  if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() < 1e-12) {
    throw ValueError("known-block covariance is singular");
  }
  out.mean = mu_u + s_uk * llt.solve(x_k - mu_k);
  out.covariance = s_uu - s_uk * llt.solve(s_uk.transpose());
  return out;
}

MomentError conditional_moment_error(const Tensor& samples, const GaussianMixturePrior& prior, const Tensor& x_known,
                                     const Tensor& mask) {
  const std::size_t n = samples.rows();
  if (n < 1000) throw ValueError("conditional_moment_error needs at least 1000 samples");
  if (samples.row_size() != prior.dim()) throw ShapeError("sample dimension does not match prior");
  const GaussianConditional exact = gaussian_conditional(prior, x_known, mask);
  const auto nu = static_cast<Eigen::Index>(exact.unknown.size());
  if (nu == 0) throw ValueError("mask has no unknown coordinates");

  Eigen::MatrixXd data(static_cast<Eigen::Index>(n), nu);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = samples.row(i);
    for (Eigen::Index a = 0; a < nu; ++a) data(static_cast<Eigen::Index>(i), a) = row[exact.unknown[a]];
  }
  const Eigen::VectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);

  const double mean_scale = exact.mean.norm();
  MomentError err{};
  err.mean_err = (mean - exact.mean).norm() / (mean_scale > 0.0 ? mean_scale : 1.0);
  err.cov_err = (cov - exact.covariance).norm() / exact.covariance.norm();
  return err;
}

double diversity_score(const Tensor& outputs) {
  const std::size_t n = outputs.rows();
  if (outputs.rank() < 2 || n < 2) throw ValueError("diversity_score needs at least two outputs");
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < n; ++a) {
    const auto ra = outputs.row(a);
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto rb = outputs.row(b);
      double sq = 0.0;
      for (std::size_t k = 0; k < ra.size(); ++k) sq += (ra[k] - rb[k]) * (ra[k] - rb[k]);
      total += std::sqrt(sq);
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

GaussianBenchmark default_gaussian_benchmark() {
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 0.8, 0.8, 1.0;
  GaussianBenchmark bench{.prior = GaussianMixturePrior::single(Eigen::VectorXd::Zero(2), cov),
                          .x_known = Tensor({2}, {1.5, 0.0}),
                          .mask = Tensor({2}, {1.0, 0.0}),
                          .sampler = {},
                          .seeds = {}};
  for (std::uint64_t s = 0; s < 20; ++s) bench.seeds.push_back(s);
  return bench;
}

NoiseSchedule benchmark_schedule(const GaussianBenchmark& bench, int steps) {
  return bench.schedule_kind == ScheduleKind::Cosine ? build_cosine_schedule(steps)
                                                     : build_linear_schedule(steps, bench.beta_start, bench.beta_end);
}

std::string_view to_string(ScheduleFamily family) {
  switch (family) {
    case ScheduleFamily::Jump:
      return "jump";
    case ScheduleFamily::Slowdown:
      return "slowdown";
    case ScheduleFamily::Sdedit:
      return "sdedit";
  }
  return "unknown";
}

std::string SettingSpec::label() const {
  std::ostringstream out;
  out << to_string(family) << " T=" << steps;
  switch (family) {
    case ScheduleFamily::Jump:
      out << " j=" << jump_length << " r=" << resamplings;
      break;
    case ScheduleFamily::Slowdown:
      out << " x" << slowdown_factor;
      break;
    case ScheduleFamily::Sdedit:
      out << " n=" << sdedit_repeats;
      break;
  }
  return out.str();
}

std::size_t SettingSpec::nfe() const {
  switch (family) {
    case ScheduleFamily::Jump:
      return jump_schedule_nfe(steps, jump_length, resamplings);
    case ScheduleFamily::Slowdown:
      return generate_slowdown_schedule(steps, slowdown_factor).schedule.reverse_count();
    case ScheduleFamily::Sdedit:
      return generate_sdedit_schedule(steps, sdedit_repeats).reverse_count();
  }
  return 0;
}

AblationRow run_setting(const GaussianBenchmark& bench, const SettingSpec& setting, std::uint64_t seed) {
  const GaussianMixtureDenoiser model(bench.prior);
  Rng rng(seed);
  SampleResult result;
  switch (setting.family) {
    case ScheduleFamily::Jump: {
      const auto sched = benchmark_schedule(bench, setting.steps);
      const auto ts = generate_jump_schedule(setting.steps, setting.jump_length, setting.resamplings);
      result = repaint_inpaint(model, sched, ts, bench.x_known, bench.mask, bench.chains, bench.sampler, rng);
      break;
    }
    case ScheduleFamily::Slowdown: {
      const auto plan = generate_slowdown_schedule(setting.steps, setting.slowdown_factor);
      const auto sched = benchmark_schedule(bench, plan.steps);
      result = repaint_inpaint(model, sched, plan.schedule, bench.x_known, bench.mask, bench.chains, bench.sampler, rng);
      break;
    }
    case ScheduleFamily::Sdedit: {
      const auto sched = benchmark_schedule(bench, setting.steps);
      const auto plan = generate_sdedit_schedule(setting.steps, setting.sdedit_repeats);
      result = repaint_inpaint(model, sched, plan, bench.x_known, bench.mask, bench.chains, bench.sampler, rng);
      break;
    }
  }
  const MomentError err = conditional_moment_error(result.samples, bench.prior, bench.x_known, bench.mask);
  return {setting, result.nfe, seed, err.mean_err, err.cov_err};
}

AblationReport run_settings(const GaussianBenchmark& bench, std::span<const SettingSpec> settings, std::string title) {
  if (bench.seeds.empty()) throw ValueError("benchmark needs at least one seed");
  AblationReport report;
  report.title = std::move(title);
  {
    std::ostringstream meta;
    meta << "prior=single-gaussian dim=" << bench.prior.dim() << " schedule=" << to_string(bench.schedule_kind)
         << " sigma=" << to_string(bench.sampler.sigma_mode) << " chains=" << bench.chains
         << " seeds=" << bench.seeds.size();
    report.metadata = meta.str();
  }

  const std::size_t per_setting = bench.seeds.size();
  report.rows.resize(settings.size() * per_setting);
  const std::size_t jobs = report.rows.size();
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(jobs, std::thread::hardware_concurrency()));
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t job = w; job < jobs; job += workers) {
            report.rows[job] = run_setting(bench, settings[job / per_setting], bench.seeds[job % per_setting]);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return report;
}

std::vector<SettingSummary> AblationReport::summarize() const {
  std::vector<SettingSummary> out;
  for (const auto& row : rows) {
    const std::string label = row.setting.label();
    auto it = std::find_if(out.begin(), out.end(), [&](const SettingSummary& s) { return s.setting.label() == label; });
    if (it == out.end()) {
      out.push_back({row.setting, row.nfe, 0, 0.0, 0.0});
      it = out.end() - 1;
    }
    ++it->seeds;
    it->mean_err += row.mean_err;
    it->cov_err += row.cov_err;
  }
  for (auto& s : out) {
    s.mean_err /= static_cast<double>(s.seeds);
    s.cov_err /= static_cast<double>(s.seeds);
  }
  return out;
}

SettingSummary AblationReport::summary_for(const std::string& label) const {
  for (const auto& s : summarize()) {
    if (s.setting.label() == label) return s;
  }
  throw ValueError("no setting labelled '" + label + "' in report");
}

void AblationReport::write_csv(std::ostream& out) const {
  out << "setting,family,steps,jump_length,resamplings,slowdown_factor,sdedit_repeats,nfe,seed,mean_err,cov_err\n";
  out << std::setprecision(17);
  for (const auto& row : rows) {
    const auto& s = row.setting;
    out << '"' << s.label() << "\"," << to_string(s.family) << ',' << s.steps << ',' << s.jump_length << ','
        << s.resamplings << ',' << s.slowdown_factor << ',' << s.sdedit_repeats << ',' << row.nfe << ',' << row.seed
        << ',' << row.mean_err << ',' << row.cov_err << '\n';
  }
}

void AblationReport::write_summary(std::ostream& out) const {
  out << title << '\n' << metadata << '\n';
  out << std::left << std::setw(28) << "setting" << std::right << std::setw(8) << "NFE" << std::setw(7) << "seeds"
      << std::setw(12) << "mean_err" << std::setw(12) << "cov_err" << '\n';
  const auto flags = out.flags();
  for (const auto& s : summarize()) {
    out << std::left << std::setw(28) << s.setting.label() << std::right << std::setw(8) << s.nfe << std::setw(7)
        << s.seeds << std::fixed << std::setprecision(5) << std::setw(12) << s.mean_err << std::setw(12) << s.cov_err
        << '\n';
    out.flags(flags);
  }
}

AblationReport run_resample_vs_slowdown(const GaussianBenchmark& bench, std::span<const ResampleBudget> budgets) {
  std::vector<SettingSpec> settings;
  for (const auto& b : budgets) {
    SettingSpec jump{.family = ScheduleFamily::Jump, .steps = b.steps, .jump_length = b.jump_length,
                     .resamplings = b.resamplings};
    SettingSpec slow{.family = ScheduleFamily::Slowdown, .steps = b.steps, .slowdown_factor = b.slowdown_factor};
    if (jump.nfe() != slow.nfe()) {
      throw ValueError("unmatchable budget: " + jump.label() + " uses " + std::to_string(jump.nfe()) + " NFE, " +
                       slow.label() + " uses " + std::to_string(slow.nfe()));
    }
    settings.push_back(jump);
    settings.push_back(slow);
  }
  return run_settings(bench, settings, "resampling vs. slow-down at equal NFE");
}

AblationReport run_jump_grid(const GaussianBenchmark& bench, int steps, std::span<const int> jump_lengths,
                             std::span<const int> resamplings) {
  std::vector<SettingSpec> settings;
  for (int j : jump_lengths) {
    for (int r : resamplings) {
      settings.push_back({.family = ScheduleFamily::Jump, .steps = steps, .jump_length = j, .resamplings = r});
    }
  }
  return run_settings(bench, settings, "jump length / resampling grid");
}

AblationReport run_sdedit_comparison(const GaussianBenchmark& bench, int steps, int jump_length, int resamplings,
                                     int sdedit_repeats) {
  const SettingSpec jump{.family = ScheduleFamily::Jump, .steps = steps, .jump_length = jump_length,
                         .resamplings = resamplings};
  const SettingSpec sdedit{.family = ScheduleFamily::Sdedit, .steps = steps, .sdedit_repeats = sdedit_repeats};
  if (jump.nfe() != sdedit.nfe()) {
    throw ValueError("unmatched NFE: " + jump.label() + " uses " + std::to_string(jump.nfe()) + ", " +
                     sdedit.label() + " uses " + std::to_string(sdedit.nfe()));
  }
  const SettingSpec settings[] = {jump, sdedit};
  return run_settings(bench, settings, "resampling vs. SDEdit restarts at equal NFE");
}

}  // namespace repaint
