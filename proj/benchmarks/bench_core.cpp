#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <random>

#include "denjoy/blowup.hpp"
#include "denjoy/confspace.hpp"
#include "denjoy/denjoy_circle.hpp"
#include "denjoy/distortion.hpp"
#include "denjoy/sampling.hpp"
#include "denjoy/trap.hpp"

using namespace denjoy;

namespace {

TranslationVector theta2() {
  Vector t(2);
  t << std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0;
  return make_translation(t);
}

std::shared_ptr<const blowup::BallSystem> system2(int window) {
  return std::make_shared<const blowup::BallSystem>(
      blowup::build_ball_system(theta2(), window, blowup::Schedule{0.05, 0.8}, 0.5));
}

}  // namespace

static void BM_ConfDist(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const auto p = confspace::normalize(sampling::random_invertible(k, rng));
  const auto q = confspace::normalize(sampling::random_invertible(k, rng));
  for (auto _ : state) benchmark::DoNotOptimize(confspace::conf_dist(p, q));
}
BENCHMARK(BM_ConfDist)->Arg(2)->Arg(3)->Arg(4)->Arg(8);

static void BM_DistToBase(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  const Matrix a = sampling::random_invertible(k, rng);
  for (auto _ : state) benchmark::DoNotOptimize(confspace::dist_to_base(a));
}
BENCHMARK(BM_DistToBase)->Arg(2)->Arg(4);

static void BM_DenjoyConstruct(benchmark::State& state) {
  dynamics::DenjoyParams p;
  p.truncation = state.range(0);
  p.tail_tolerance = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::DenjoyCircle(p).inserted_length());
}
BENCHMARK(BM_DenjoyConstruct)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);

static void BM_DenjoyIterate(benchmark::State& state) {
  const dynamics::DenjoyCircle c(dynamics::DenjoyParams{});
  double z = 0.5;
  for (auto _ : state) {
    z = c.lift(z);
    z -= std::floor(z);
    benchmark::DoNotOptimize(z);
  }
}
BENCHMARK(BM_DenjoyIterate);

static void BM_BuildBallSystem(benchmark::State& state) {
  const int window = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(system2(window)->radius(0));
}
BENCHMARK(BM_BuildBallSystem)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_CocycleTrace(benchmark::State& state) {
  const auto s = system2(2000);
  const blowup::SyntheticField f(s, blowup::volume_profile(*s, 2, 1.0, blowup::diagonal_direction(2)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(distortion::trace_cocycle_distortion(f, TorusPoint(s->center(0)), 2000).direct.back());
  }
}
BENCHMARK(BM_CocycleTrace)->Unit(benchmark::kMillisecond);

static void BM_CertifyTrap(benchmark::State& state) {
  const auto s = system2(2000);
  for (auto _ : state) benchmark::DoNotOptimize(trap::certify_trap(*s, trap::TrapParams{}).n);
}
BENCHMARK(BM_CertifyTrap)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
