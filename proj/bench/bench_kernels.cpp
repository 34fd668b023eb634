// SPDX-License-Identifier: Apache-2.0
// Parallel kernels against the serial reference on an SBM-sized workload.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>

#include "ness/dataset.hpp"
#include "ness/graph.hpp"
#include "ness/kernels.hpp"

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  fn();
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / reps;
}

ness::Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ness::Matrix m(r, c);
  for (double& x : m.values()) x = u(rng);
  return m;
}

void report(const char* name, double par, double ref, bool same) {
  std::printf("%-10s parallel %9.3f ms  reference %9.3f ms  speedup %5.2fx  %s\n", name, par, ref, ref / par,
              same ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t nodes = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 4000;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 5;
  ness::SbmParams p;
  p.block_sizes = {nodes / 4, nodes / 4, nodes / 4, nodes - 3 * (nodes / 4)};
  p.feature_dim = 256;
  p.seed = 7;
  const auto data = ness::generate_sbm(p);
  const auto adj = ness::normalize_adjacency(data.graph.adjacency());
  std::mt19937_64 rng(11);
  const ness::Matrix w = random_matrix(256, 64, rng);
  const ness::Matrix h = random_matrix(nodes, 64, rng);
  const ness::Matrix& x = data.graph.features();

  std::printf("nodes %zu, nnz %zu, threads %d\n", nodes, adj.matrix.nnz(), ness::kernel_threads());
  ness::Matrix a, b;
  double tp = time_ms([&] { a = ness::matmul(x, w); }, reps);
  double tr = time_ms([&] { b = ness::reference::matmul(x, w); }, reps);
  report("matmul", tp, tr, a == b);
  tp = time_ms([&] { a = ness::matmul_tn(x, h); }, reps);
  tr = time_ms([&] { b = ness::reference::matmul_tn(x, h); }, reps);
  report("matmul_tn", tp, tr, a == b);
  tp = time_ms([&] { a = ness::matmul_nt(h, h); }, reps);
  tr = time_ms([&] { b = ness::reference::matmul_nt(h, h); }, reps);
  report("matmul_nt", tp, tr, a == b);
  tp = time_ms([&] { a = ness::spmm(adj.matrix, h); }, reps);
  tr = time_ms([&] { b = ness::reference::spmm(adj.matrix, h); }, reps);
  report("spmm", tp, tr, a == b);
  return 0;
}
