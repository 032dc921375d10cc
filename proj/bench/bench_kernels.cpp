// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <memory>

#include "explorer/bundle.hpp"
#include "explorer/io.hpp"
#include "explorer/kernels.hpp"

using namespace explorer;

namespace {

CompositeSpace load(const char* name) {
  auto scene = std::make_shared<const Scene>(
      parse_scene(read_file(fixture_path(std::string("scenes/") + name + ".json"))));
  return single_level_bundle(scene).level(1);
}

const CompositeSpace& solovey() {
  static const CompositeSpace space = load("solovey_tee");
  return space;
}

std::vector<Config> cloud(std::size_t n) {
  Rng rng(1);
  std::vector<Config> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(solovey().sample_uniform(rng));
  return pts;
}

template <auto Fn>
void BM_nearest(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)));
  Rng rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Fn(solovey(), pts, solovey().sample_uniform(rng), 10, {}));
  }
}

template <auto Fn>
void BM_within_radius(benchmark::State& state) {
  const auto pts = cloud(static_cast<std::size_t>(state.range(0)));
  const double r = 0.15 * solovey().measure();
  Rng rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(Fn(solovey(), pts, solovey().sample_uniform(rng), r, {}));
  }
}

template <auto Fn>
void BM_rungs(benchmark::State& state) {
  // short rungs around the start, all feasible
  const auto n = static_cast<std::size_t>(state.range(0));
  const Config s = solovey().start();
  std::vector<Config> from(n, s), to(n, s);
  Rng rng(3);
  for (std::size_t i = 0; i < n; ++i) to[i] = solovey().perturb(s, 0.02 * solovey().measure(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(solovey(), from, to));
}

template <auto Fn>
void BM_optimize_all(benchmark::State& state) {
  static const CompositeSpace space = load("crossing_disks");
  const ShortcutOptimizer opt;
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<Path> paths;
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < n; ++i) {
    paths.push_back(Path{1, {space.start(), Config({1.0, 0.0}), space.goal()}});
    seeds.push_back(i);
  }
  for (auto _ : state) benchmark::DoNotOptimize(Fn(opt, space, paths, seeds));
}

}  // namespace

BENCHMARK(BM_nearest<&kernels::serial::nearest>)->Arg(1000)->Arg(20000);
BENCHMARK(BM_nearest<&kernels::parallel::nearest>)->Arg(1000)->Arg(20000);
BENCHMARK(BM_within_radius<&kernels::serial::within_radius>)->Arg(1000)->Arg(20000);
BENCHMARK(BM_within_radius<&kernels::parallel::within_radius>)->Arg(1000)->Arg(20000);
BENCHMARK(BM_rungs<&kernels::serial::all_rungs_feasible>)->Arg(100)->Arg(1000);
BENCHMARK(BM_rungs<&kernels::parallel::all_rungs_feasible>)->Arg(100)->Arg(1000);
BENCHMARK(BM_optimize_all<&kernels::serial::optimize_all>)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_optimize_all<&kernels::parallel::optimize_all>)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
