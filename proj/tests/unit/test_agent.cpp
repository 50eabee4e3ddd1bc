#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>

#include "doctest.h"

#include "pet/agent/actor.hpp"
#include "pet/agent/params.hpp"
#include "pet/agent/policy.hpp"
#include "pet/agent/trainer.hpp"
#include "pet/rng.hpp"

using namespace pet;
using namespace pet::agent;

namespace {

PolicyConfig tiny() {
  PolicyConfig c;
  c.layers = 2;
  c.heads = 2;
  c.hidden = 8;
  c.embed_dim = 6;
  c.ffn = 10;
  c.init_seed = 3;
  return c;
}

AgentInput random_input(const PolicyConfig& c, int n, Rng& rng) {
  auto v = [&] {
    Vec x(c.embed_dim);
    for (int i = 0; i < c.embed_dim; ++i) x[i] = rng.uniform() * 2 - 1;
    return x;
  };
  AgentInput in{v(), v(), v(), Mat(n, c.embed_dim)};
  for (int i = 0; i < n; ++i) in.actions.row(i) = v().transpose();
  return in;
}

double loss_at(const PolicyParams& p, const AgentInput& in, int target) {
  return -std::log(forward(p, in)[target]);
}

}  // namespace

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(5);
  auto p = PolicyParams::init(tiny());
  // Larger weights than the init so every path carries signal.
  for (auto& x : p.values) x += (rng.uniform() - 0.5) * 0.4;
  const auto in = random_input(p.config, 4, rng);
  ForwardCache cache;
  forward(p, in, &cache);
  Buffer grad(p.values.size(), 0.0);
  backward(p, cache, 2, grad);
  double worst = 0;
  const double h = 1e-5;
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const double keep = p.values[i];
    p.values[i] = keep + h;
    const double up = loss_at(p, in, 2);
    p.values[i] = keep - h;
    const double down = loss_at(p, in, 2);
    p.values[i] = keep;
    const double num = (up - down) / (2 * h);
    const double rel = std::abs(num - grad[i]) / std::max(1e-6, std::abs(num) + std::abs(grad[i]));
    worst = std::max(worst, rel);
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("policy is a distribution and equivariant to action order") {
  Rng rng(8);
  const auto p = PolicyParams::init(tiny());
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(9));
    auto in = random_input(p.config, n, rng);
    const auto pi = forward(p, in);
    REQUIRE(pi.size() == n);
    CHECK(std::abs(pi.sum() - 1.0) < 1e-9);
    CHECK((pi.array() >= 0).all());
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    AgentInput shuffled = in;
    for (int i = 0; i < n; ++i) shuffled.actions.row(i) = in.actions.row(perm[i]);
    const auto pi2 = forward(p, shuffled);
    for (int i = 0; i < n; ++i) CHECK(std::abs(pi2[i] - pi[perm[i]]) < 1e-12);
  }
}

TEST_CASE("history average") {
  CHECK(history_average({}, 3) == Vec::Zero(3));
  Vec a(2), b(2);
  a << 1, 2;
  b << 3, 6;
  CHECK(history_average({a, b}, 2).isApprox(Vec((Vec(2) << 2, 4).finished())));
}

TEST_CASE("argmax and sampling") {
  Vec p(4);
  p << 0.1, 0.4, 0.4, 0.1;
  CHECK(greedy_index(p) == 1);
  Rng rng(1);
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 20000; ++i) counts[sample_index(p, rng)] += 1;
  CHECK(counts[1] / 20000.0 == doctest::Approx(0.4).epsilon(0.05));
  CHECK(counts[0] / 20000.0 == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("checkpoint round trip and errors") {
  const auto dir = std::filesystem::temp_directory_path() / "pet_agent_test";
  std::filesystem::create_directories(dir);
  const auto p = PolicyParams::init(tiny());
  p.save(dir / "a.ckpt");
  const auto q = PolicyParams::load(dir / "a.ckpt");
  CHECK(q.config == p.config);
  CHECK(q.values == p.values);
  {
    std::ofstream bad(dir / "b.ckpt");
    bad << "garbage\n";
  }
  CHECK_THROWS_AS(PolicyParams::load(dir / "b.ckpt"), CheckpointError);
  CHECK_THROWS_AS(PolicyParams::load(dir / "missing.ckpt"), CheckpointError);
  std::filesystem::remove_all(dir);
  PolicyConfig c = tiny();
  c.heads = 3;
  CHECK_THROWS(c.validate());
}

TEST_CASE("training fits a small separable set") {
  Rng rng(2);
  const auto c = tiny();
  std::vector<Sample> samples;
  for (int i = 0; i < 32; ++i) {
    auto in = random_input(c, 3, rng);
    // The target is the action most aligned with the task vector.
    int best = 0;
    for (int k = 1; k < 3; ++k)
      if (in.actions.row(k).dot(in.task) > in.actions.row(best).dot(in.task)) best = k;
    samples.push_back({in, best});
  }
  TrainConfig tc;
  tc.epochs = 200;
  const auto r = train_bc(samples, PolicyParams::init(c), tc);
  CHECK(r.epoch_loss.back() < r.epoch_loss.front());
  CHECK(action_accuracy(r.params, samples) >= 0.9);
  CHECK(r.params.all_finite());
  CHECK_THROWS(train_bc({}, PolicyParams::init(c), tc));
}

TEST_CASE("training is bit-reproducible whatever the heap layout") {
  Rng rng(6);
  PolicyConfig c = tiny();
  c.hidden = 16;
  c.embed_dim = 13;  // odd sizes put tensors at every alignment
  std::vector<Sample> samples;
  for (int i = 0; i < 16; ++i) samples.push_back({random_input(c, 5, rng), i % 5});
  TrainConfig tc;
  tc.epochs = 5;
  const auto first = train_bc(samples, PolicyParams::init(c), tc).params.values;
  std::vector<std::unique_ptr<char[]>> junk;
  for (int round = 1; round < 6; ++round) {
    junk.emplace_back(new char[8 * round]);
    CHECK(train_bc(samples, PolicyParams::init(c), tc).params.values == first);
  }
}
