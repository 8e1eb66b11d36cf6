#include <cmath>
#include <numbers>

#include "doctest.h"
#include "repaint/error.hpp"
#include "repaint/random.hpp"
#include "repaint/schedule.hpp"

using namespace repaint;

namespace {

// Independent reference: linear betas at T steps from endpoints quoted for
// 1000 steps, product accumulated in long double.
long double reference_linear_alpha_bar(int steps, int t) {
  const long double scale = 1000.0L / steps;
  const long double lo = 1e-4L * scale;
  const long double hi = 0.02L * scale;
  long double prod = 1.0L;
  for (int s = 1; s <= t; ++s) {
    const long double beta = steps == 1 ? lo : lo + (hi - lo) * (s - 1) / (steps - 1);
    prod *= 1.0L - beta;
  }
  return prod;
}

double reference_cosine_alpha_bar(int steps, int t) {
  constexpr double s = 0.008;
  auto f = [&](int k) {
    const double c = std::cos((static_cast<double>(k) / steps + s) / (1.0 + s) * std::numbers::pi / 2.0);
    return c * c;
  };
  return f(t) / f(0);
}

}  // namespace

TEST_CASE("linear schedule: single step without rescale") {
  const auto sched = build_linear_schedule(1, 0.5, 0.5, false);
  REQUIRE(sched.steps() == 1);
  CHECK(sched.beta(1) == 0.5);
  CHECK(sched.alpha_bar(1) == 0.5);
  CHECK(sched.alpha_bar(0) == 1.0);
}

TEST_CASE("linear schedule: two equal betas square the survival") {
  const double beta = 0.3;
  const auto sched = build_linear_schedule(2, beta, beta, false);
  CHECK(sched.alpha_bar(2) == doctest::Approx((1 - beta) * (1 - beta)).epsilon(1e-15));
}

TEST_CASE("linear schedule at T=250 matches an independent product") {
  const auto sched = build_linear_schedule(250);
  const long double expected = reference_linear_alpha_bar(250, 250);
  CHECK(sched.alpha_bar(250) < 1e-4);
  CHECK(std::abs(sched.alpha_bar(250) - static_cast<double>(expected)) / static_cast<double>(expected) < 1e-10);
  // Pinned from a separate double-precision script.
  CHECK(sched.alpha_bar(250) == doctest::Approx(3.264409135490725e-05).epsilon(1e-9));
  for (int t : {1, 17, 125, 249}) {
    CHECK(sched.alpha_bar(t) == doctest::Approx(static_cast<double>(reference_linear_alpha_bar(250, t))).epsilon(1e-12));
  }
}

TEST_CASE("linear schedule endpoints are rescaled by 1000/T") {
  const auto sched = build_linear_schedule(100);
  CHECK(sched.beta(1) == doctest::Approx(1e-3));
  CHECK(sched.beta(100) == doctest::Approx(0.2));
}

TEST_CASE("linear schedule rejects bad parameters") {
  CHECK_THROWS_AS(build_linear_schedule(0), ValueError);
  CHECK_THROWS_AS(build_linear_schedule(10, 0.0, 0.02, false), ValueError);
  CHECK_THROWS_AS(build_linear_schedule(10, 0.03, 0.02, false), ValueError);
  // 0.02 * 1000/10 = 2 leaves (0, 1).
  CHECK_THROWS_AS(build_linear_schedule(10), ValueError);
}

TEST_CASE("cosine schedule") {
  SUBCASE("single step") {
    const auto sched = build_cosine_schedule(1);
    CHECK(sched.beta(1) > 0.0);
    CHECK(sched.beta(1) < 1.0);
  }
  SUBCASE("closed-form midpoint at T=250") {
    const auto sched = build_cosine_schedule(250);
    CHECK(sched.alpha_bar(125) / sched.alpha_bar(0) == doctest::Approx(reference_cosine_alpha_bar(250, 125)).epsilon(1e-12));
    CHECK(sched.alpha_bar(125) == doctest::Approx(0.49384359044063775).epsilon(1e-12));
  }
  SUBCASE("betas clipped") {
    const auto sched = build_cosine_schedule(250);
    for (double b : sched.betas()) CHECK(b <= 0.999);
  }
  CHECK_THROWS_AS(build_cosine_schedule(0), ValueError);
}

TEST_CASE("schedule invariants hold for both kinds and several lengths") {
  for (int steps : {1, 2, 7, 50, 250, 1000}) {
    for (const auto& sched : {build_linear_schedule(steps, 1e-4, 0.02, steps > 20),
                              build_cosine_schedule(steps)}) {
      CAPTURE(steps);
      long double running = 1.0L;
      for (int t = 1; t <= steps; ++t) {
        CHECK(sched.beta(t) > 0.0);
        CHECK(sched.beta(t) < 1.0);
        CHECK(sched.alpha(t) == 1.0 - sched.beta(t));
        CHECK(sched.alpha_bar(t) < sched.alpha_bar(t - 1));
        running *= sched.alpha(t);
        CHECK(std::abs(sched.alpha_bar(t) - static_cast<double>(running)) <= 1e-12 * static_cast<double>(running));
      }
    }
  }
}

TEST_CASE("forward_step and forward_sample closed forms") {
  const auto sched = build_linear_schedule(250);
  const Tensor x({3}, {1.0, -2.0, 0.5});
  const Tensor zero({3}, 0.0);
  const Tensor n({3}, {0.3, 0.1, -1.2});

  SUBCASE("zero input scales noise") {
    const auto y = forward_step(zero, 7, n, sched);
    for (std::size_t i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(std::sqrt(sched.beta(7)) * n[i]));
    const auto z = forward_sample(zero, 7, n, sched);
    for (std::size_t i = 0; i < 3; ++i) CHECK(z[i] == doctest::Approx(std::sqrt(1 - sched.alpha_bar(7)) * n[i]));
  }
  SUBCASE("tiny beta leaves the input") {
    const auto tiny = build_linear_schedule(1, 1e-14, 1e-14, false);
    const auto y = forward_step(x, 1, n, tiny);
    for (std::size_t i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(x[i]).epsilon(1e-6));
  }
  SUBCASE("t = 0 returns x0") { CHECK(forward_sample(x, 0, n, sched) == x); }
  SUBCASE("terminal scale") {
    const auto y = forward_sample(Tensor({1}, {1.0}), 250, Tensor({1}, {0.0}), sched);
    CHECK(y[0] == doctest::Approx(std::sqrt(static_cast<double>(reference_linear_alpha_bar(250, 250)))).epsilon(1e-10));
    CHECK(y[0] == doctest::Approx(0.005713500796788887).epsilon(1e-9));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(forward_step(x, 0, n, sched), RangeError);
    CHECK_THROWS_AS(forward_step(x, 251, n, sched), RangeError);
    CHECK_THROWS_AS(forward_sample(x, -1, n, sched), RangeError);
    CHECK_THROWS_AS(forward_sample(x, 3, Tensor({2}), sched), ShapeError);
  }
}

TEST_CASE("forward_sample variance is 1 - alpha_bar") {
  const auto sched = build_linear_schedule(50);
  Rng rng(11);
  constexpr std::size_t n = 100000;
  for (int t : {1, 25, 50}) {
    const Tensor x0({n}, 0.7);
    const auto y = forward_sample(x0, t, normal_tensor({n}, rng), sched);
    double mean = 0, sq = 0;
    for (double v : y.values()) mean += v;
    mean /= n;
    for (double v : y.values()) sq += (v - mean) * (v - mean);
    const double var = sq / (n - 1);
    CHECK(std::abs(var / (1 - sched.alpha_bar(t)) - 1) < 0.02);
  }
}

TEST_CASE("composed forward steps match the one-shot marginal") {
  const auto sched = build_linear_schedule(50);
  Rng rng(5);
  constexpr std::size_t n = 100000;
  constexpr int k = 10;
  Tensor x({n}, 1.0);
  for (int t = 1; t <= k; ++t) x = forward_step(x, t, normal_tensor({n}, rng), sched);
  double mean = 0, sq = 0;
  for (double v : x.values()) mean += v;
  mean /= n;
  for (double v : x.values()) sq += (v - mean) * (v - mean);
  const double var = sq / (n - 1);
  CHECK(std::abs(mean / std::sqrt(sched.alpha_bar(k)) - 1) < 0.01);
  CHECK(std::abs(var / (1 - sched.alpha_bar(k)) - 1) < 0.02);
}
