#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "repaint/datasets.hpp"
#include "repaint/error.hpp"
#include "repaint/mlp.hpp"
#include "support/oracles.hpp"

using namespace repaint;

TEST_CASE("layer bookkeeping") {
  const MlpDenoiser model(2, {8, 4});
  CHECK(model.layer_sizes() == std::vector<std::size_t>{18, 8, 4, 2});
  CHECK(model.parameter_count() == 18 * 8 + 8 + 8 * 4 + 4 + 4 * 2 + 2);
  CHECK_THROWS_AS(MlpDenoiser(0, {4}), ValueError);
  CHECK_THROWS_AS(MlpDenoiser(2, {0}), ValueError);
}

TEST_CASE("zero parameters give zero output") {
  const MlpDenoiser model(3, {5});
  const auto out = mlp_forward(model, Tensor({2, 3}, {1, 2, 3, 4, 5, 6}), 7);
  CHECK(out == Tensor({2, 3}, 0.0));
}

TEST_CASE("forward pass matches a hand computation") {
  // One hidden unit, 1-D data: out = w2 * tanh(w1 . [x, feats] + b1) + b2.
  MlpDenoiser model(1, {1});
  auto& l0 = model.layers()[0];
  auto& l1 = model.layers()[1];
  l0.weight.setZero();
  l0.weight(0, 0) = 0.5;   // x
  l0.weight(0, 1) = -0.25; // sin(t)
  l0.weight(0, 2) = 0.75;  // cos(t)
  l0.bias(0) = 0.1;
  l1.weight(0, 0) = 2.0;
  l1.bias(0) = -0.3;

  const double x = 0.8;
  const int t = 3;
  const double expected = 2.0 * std::tanh(0.5 * x - 0.25 * std::sin(3.0) + 0.75 * std::cos(3.0) + 0.1) - 0.3;
  CHECK(mlp_forward(model, Tensor({1, 1}, {x}), t)[0] == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("time features") {
  const auto f = time_features(10);
  REQUIRE(f.size() == 16);
  CHECK(f(0) == doctest::Approx(std::sin(10.0)));
  CHECK(f(1) == doctest::Approx(std::cos(10.0)));
  CHECK(f(14) == doctest::Approx(std::sin(10.0 * std::pow(1000.0, -7.0 / 8.0))));
}

TEST_CASE("batched forward equals per-row calls") {
  Rng rng(1);
  const auto model = MlpDenoiser::random(2, {16, 16}, rng);
  const auto batch = normal_tensor({6, 2}, rng);
  const std::vector<int> times{1, 5, 9, 13, 40, 50};
  const auto all = model.forward(batch, times);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto one = mlp_forward(model, Tensor({1, 2}, std::vector<double>(batch.row(i).begin(), batch.row(i).end())),
                                 times[i]);
    CHECK(one[0] == doctest::Approx(all.row(i)[0]).epsilon(1e-13));
    CHECK(one[1] == doctest::Approx(all.row(i)[1]).epsilon(1e-13));
  }
}

TEST_CASE("analytic gradients match central differences on a 2-2-2 net") {
  Rng rng(17);
  const auto model = MlpDenoiser::random(2, {2}, rng);
  const auto x_t = normal_tensor({8, 2}, rng);
  const auto eps = normal_tensor({8, 2}, rng);
  const std::vector<int> times{1, 3, 7, 11, 19, 23, 37, 50};
  CHECK(oracle::max_gradient_rel_error(model, x_t, times, eps, 1e-5) < 1e-4);
}

TEST_CASE("gradients on a deeper net") {
  Rng rng(4);
  const auto model = MlpDenoiser::random(3, {5, 4}, rng);
  const auto x_t = normal_tensor({6, 3}, rng);
  const auto eps = normal_tensor({6, 3}, rng);
  CHECK(oracle::max_gradient_rel_error(model, x_t, {2, 4, 8, 16, 32, 64}, eps, 1e-5) < 1e-4);
}

TEST_CASE("train_step") {
  const auto sched = build_linear_schedule(100);
  Rng data_rng(8);
  const auto batch = two_moons(64, 0.05, data_rng);

  SUBCASE("zero learning rate leaves parameters") {
    Rng rng(2);
    auto model = MlpDenoiser::random(2, {8}, rng);
    const auto before = model.layers();
    SgdState state;
    train_step(model, batch, sched, {0.0, 0.9}, state, rng);
    for (std::size_t l = 0; l < before.size(); ++l) {
      CHECK(model.layers()[l].weight == before[l].weight);
      CHECK(model.layers()[l].bias == before[l].bias);
    }
  }
  SUBCASE("non-finite parameters abort before updating") {
    Rng rng(2);
    auto model = MlpDenoiser::random(2, {8}, rng);
    model.layers()[0].weight(0, 0) = std::nan("");
    SgdState state;
    CHECK_THROWS_AS(train_step(model, batch, sched, {0.1, 0.0}, state, rng), NumericError);
  }
  SUBCASE("huge learning rate eventually trips the finite check") {
    Rng rng(2);
    auto model = MlpDenoiser::random(2, {8}, rng);
    SgdState state;
    bool threw = false;
    for (int i = 0; i < 200 && !threw; ++i) {
      try {
        train_step(model, batch, sched, {1e150, 0.0}, state, rng);
      } catch (const NumericError&) {
        threw = true;
      }
    }
    CHECK(threw);
  }
}

TEST_CASE("training on two moons reduces the loss") {
  const auto sched = build_linear_schedule(100);
  Rng rng(2024);
  auto model = MlpDenoiser::random(2, {64, 64}, rng);
  SgdState state;
  const SgdOptions opts{0.01, 0.9};
  std::vector<double> losses;
  for (int step = 0; step < 2000; ++step) {
    const auto batch = two_moons(128, 0.05, rng);
    losses.push_back(train_step(model, batch, sched, opts, state, rng).loss);
  }
  auto avg = [&](std::size_t from) {
    double s = 0;
    for (std::size_t i = from; i < from + 50; ++i) s += losses[i];
    return s / 50;
  };
  const double first = avg(0), last = avg(losses.size() - 50);
  MESSAGE("first-50 loss " << first << ", last-50 loss " << last);
  CHECK(last <= 0.7 * first);
}

TEST_CASE("checkpoint round trip is bit-identical") {
  Rng rng(5);
  const auto model = MlpDenoiser::random(3, {7, 5}, rng);
  const auto path = std::filesystem::temp_directory_path() / "repaint_unit_ckpt.bin";
  save_checkpoint(model, path);
  const auto loaded = load_checkpoint(path);
  CHECK(loaded.layer_sizes() == model.layer_sizes());
  const auto x = normal_tensor({4, 3}, rng);
  CHECK(mlp_forward(loaded, x, 12) == mlp_forward(model, x, 12));
  for (std::size_t l = 0; l < model.layers().size(); ++l) CHECK(loaded.layers()[l].weight == model.layers()[l].weight);

  // Corrupt the magic.
  {
    std::FILE* f = std::fopen(path.string().c_str(), "r+b");
    std::fputc('X', f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(load_checkpoint(path), IoError);
  std::filesystem::resize_file(path, 20);
  CHECK_THROWS_AS(load_checkpoint(path), IoError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint(path), IoError);
}
