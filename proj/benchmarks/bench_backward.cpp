// Times the serial and OpenMP-parallel backward passes on a few synthetic
// instances and prints the speedup. Not registered with ctest; run manually:
//   ./build/benchmarks/bench_backward [delta_prime]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "dmd/approx.hpp"
#include "dmd/dyn.hpp"

using namespace dmd;
using Clock = std::chrono::steady_clock;

namespace {

DiscreteDistribution random_dist(std::mt19937_64& rng, int size, double vmax) {
  std::uniform_real_distribution<double> value_pick(0.05, vmax), mass_pick(0.05, 1.0);
  std::vector<double> support;
  while (static_cast<int>(support.size()) < size) {
    double v = std::round(value_pick(rng) * 1000.0) / 1000.0;
    bool dup = false;
    for (double w : support) dup = dup || std::abs(w - v) < 5e-4;
    if (!dup) support.push_back(v);
  }
  std::sort(support.begin(), support.end());
  std::vector<double> probs(size);
  double total = 0.0;
  for (double& f : probs) total += (f = mass_pick(rng));
  for (double& f : probs) f /= total;
  double head = 0.0;
  for (int j = 0; j + 1 < size; ++j) head += probs[j];
  probs[size - 1] = 1.0 - head;
  return DiscreteDistribution(std::move(support), std::move(probs));
}

template <typename Fn>
double time_of(Fn&& fn) {
  auto t0 = Clock::now();
  fn();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  double delta_prime = argc > 1 ? std::atof(argv[1]) : 0.002;
  std::mt19937_64 rng(0);
  std::printf("%-28s %10s %10s %8s\n", "instance", "serial[s]", "openmp[s]", "speedup");
  for (auto [k, size] : {std::pair{4, 6}, {5, 6}, {6, 5}}) {
    std::vector<DiscreteDistribution> inst;
    for (int i = 0; i < k; ++i) inst.push_back(random_dist(rng, size, 5.0));

    double ts = time_of([&] { backward_pass(inst, delta_prime, false); });
    double tp = time_of([&] { backward_pass(inst, delta_prime, true); });
    std::printf("backward  k=%d support=%d    %10.3f %10.3f %7.2fx\n", k, size, ts, tp, ts / tp);

    double hs = time_of([&] { backward_pass_h(inst, delta_prime, false); });
    double hp = time_of([&] { backward_pass_h(inst, delta_prime, true); });
    std::printf("balance   k=%d support=%d    %10.3f %10.3f %7.2fx\n", k, size, hs, hp, hs / hp);
  }
  return 0;
}
