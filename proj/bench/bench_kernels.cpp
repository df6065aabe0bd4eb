// Serial reference kernels against their OpenMP versions. Each pair runs the
// same inputs; the Exec argument is the only difference.
#include <benchmark/benchmark.h>

#include <random>

#include "dacurv/fock.hpp"
#include "dacurv/kernels.hpp"
#include "dacurv/module_spec.hpp"
#include "dacurv/poly_parse.hpp"
#include "dacurv/submodule.hpp"

namespace {

using dacurv::Exec;

dacurv::ModuleSpec bench_spec() {
  dacurv::ModuleSpec s;
  s.d = 4;
  s.N = 2;
  s.generators.push_back(dacurv::VectorPolynomial(
      {dacurv::parse_polynomial("z1^2 - z2*z3"), dacurv::parse_polynomial("z4^2")}));
  s.generators.push_back(
      dacurv::VectorPolynomial({dacurv::parse_polynomial("z1*z4"), dacurv::parse_polynomial("z2^2 + z3^2")}));
  return s;
}

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Eigen::MatrixXd X(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) X(i, j) = g(rng);
  return X;
}

void BM_ApplyShift(benchmark::State& state, Exec exec) {
  dacurv::FockTruncation t(6, static_cast<std::uint32_t>(state.range(0)), 2);
  Eigen::MatrixXd X = random_matrix(static_cast<Eigen::Index>(t.size()), 32);
  for (auto _ : state) {
    for (std::uint32_t i = 1; i <= 6; ++i) benchmark::DoNotOptimize(dacurv::apply_shift(t, i, X, exec));
  }
  state.counters["basis"] = static_cast<double>(t.size());
}

void BM_ApplyShiftAdjoint(benchmark::State& state, Exec exec) {
  dacurv::FockTruncation t(6, static_cast<std::uint32_t>(state.range(0)), 2);
  Eigen::MatrixXd X = random_matrix(static_cast<Eigen::Index>(t.size()), 32);
  for (auto _ : state) {
    for (std::uint32_t i = 1; i <= 6; ++i) benchmark::DoNotOptimize(dacurv::apply_shift_adjoint(t, i, X, exec));
  }
}

void BM_SubmoduleBuild(benchmark::State& state, Exec exec) {
  const auto spec = bench_spec();
  dacurv::FockTruncation t(4, static_cast<std::uint32_t>(state.range(0)), 2);
  dacurv::SubmoduleOptions o;
  o.exec = exec;
  for (auto _ : state) {
    dacurv::SubmoduleTruncation sub(spec, t, o);
    benchmark::DoNotOptimize(sub.dim());
  }
}

void BM_PhiPower(benchmark::State& state, Exec exec) {
  const auto spec = bench_spec();
  dacurv::FockTruncation t(4, static_cast<std::uint32_t>(state.range(0)), 2);
  dacurv::SubmoduleTruncation sub(spec, t);
  dacurv::CompressedShifts T(sub, 4, exec);
  const auto E0 = dacurv::quotient_defect_squared(sub);
  for (auto _ : state) benchmark::DoNotOptimize(T.phi_power(E0, 4, exec).trace());
}

void BM_OrthonormalBasis(benchmark::State& state) {
  Eigen::MatrixXd A = random_matrix(state.range(0), state.range(0) / 2);
  for (auto _ : state) benchmark::DoNotOptimize(dacurv::orthonormal_basis(A));
}

void BM_OrthonormalBasisReference(benchmark::State& state) {
  Eigen::MatrixXd A = random_matrix(state.range(0), state.range(0) / 2);
  for (auto _ : state) benchmark::DoNotOptimize(dacurv::orthonormal_basis_reference(A));
}

}  // namespace

BENCHMARK_CAPTURE(BM_ApplyShift, serial, Exec::Serial)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ApplyShift, parallel, Exec::Parallel)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ApplyShiftAdjoint, serial, Exec::Serial)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ApplyShiftAdjoint, parallel, Exec::Parallel)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SubmoduleBuild, serial, Exec::Serial)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SubmoduleBuild, parallel, Exec::Parallel)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PhiPower, serial, Exec::Serial)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_PhiPower, parallel, Exec::Parallel)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OrthonormalBasis)->Arg(200)->Arg(600)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OrthonormalBasisReference)->Arg(200)->Arg(600)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
