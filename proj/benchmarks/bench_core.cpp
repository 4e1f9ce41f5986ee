#include "confbound/discretize.hpp"
#include "confbound/eigensolve.hpp"
#include "confbound/measures.hpp"
#include "confbound/mesh.hpp"
#include "confbound/sphere_geometry.hpp"
#include "confbound/verify.hpp"

#include <benchmark/benchmark.h>

#include <memory>

namespace {

using namespace confbound;

void BM_Mobius(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  Vec x = Vec::Zero(m + 1);
  x[0] = 0.3;
  x[m] = -0.4;
  Vec y = Vec::Zero(m + 1);
  y[1] = 1.0;
  for (auto _ : state) {
    y = kernel::mobius(x, y);
    y /= y.norm();
    benchmark::DoNotOptimize(y);
  }
}
BENCHMARK(BM_Mobius)->Arg(2)->Arg(3);

void BM_CenterOfMass(benchmark::State& state) {
  const Mesh mesh = build_mesh(2, static_cast<int>(state.range(0)));
  const DiscreteMeasure mu = volume_measure(ConformalMetric::random(2, 4, 0.5, 7), mesh);
  for (auto _ : state) {
    benchmark::DoNotOptimize(center_of_mass(mu, precise_center_options()));
  }
  state.SetItemsProcessed(state.iterations() * mu.size());
}
BENCHMARK(BM_CenterOfMass)->Arg(3)->Arg(4)->Arg(5);

void BM_Assemble(benchmark::State& state) {
  const Mesh mesh = build_mesh(2, static_cast<int>(state.range(0)));
  const ConformalMetric g = ConformalMetric::random(2, 4, 0.5, 7);
  const Eigen::VectorXd phi = g.sample(mesh);
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_nodal(mesh, phi));
  }
}
BENCHMARK(BM_Assemble)->Arg(4)->Arg(5);

void BM_Solve(benchmark::State& state) {
  const Mesh mesh = build_mesh(2, static_cast<int>(state.range(0)));
  const GalerkinPair pair = assemble(ConformalMetric::random(2, 4, 0.5, 7), mesh);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_bottom(pair));
  }
}
BENCHMARK(BM_Solve)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_VectorField(benchmark::State& state) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(2, static_cast<int>(state.range(0))));
  auto d = std::make_shared<const Discretization>(discretize(ConformalMetric::random(2, 4, 0.5, 7), mesh));
  const VectorField field(d, first_excited(solve_bottom(d->pair)));
  const SpherePoint p = SpherePoint::normalized(Eigen::Vector3d(1.0, 2.0, 3.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(field.sample(p, 0.4));
  }
}
BENCHMARK(BM_VectorField)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
