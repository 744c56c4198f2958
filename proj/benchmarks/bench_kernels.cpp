// Wall-clock comparison of the OpenMP kernels against their serial
// reference implementations. Build and run:
//   cmake --build build --target migrad_bench && ./build/benchmarks/migrad_bench

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "migrad/kernels.hpp"
#include "migrad/projection.hpp"
#include "migrad/rng.hpp"
#include "migrad/serial.hpp"

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
  fn();  // warm up
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s serial %9.2f ms   openmp %9.2f ms   speedup %5.2fx\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());

  {
    const Eigen::MatrixXd X = migrad::standard_normal(2000, 20, 1);
    report("pairwise_sqdist 2000x20",
           time_ms([&] { migrad::serial::pairwise_sqdist(X); }, 3),
           time_ms([&] { migrad::pairwise_sqdist(X); }, 3));
  }
  {
    const Eigen::MatrixXd Q = migrad::standard_normal(500, 20, 2);
    const Eigen::MatrixXd X = migrad::standard_normal(2000, 20, 3);
    report("cross_sqdist 500x2000x20",
           time_ms([&] { migrad::serial::cross_sqdist(Q, X); }, 3),
           time_ms([&] { migrad::cross_sqdist(Q, X); }, 3));
  }
  {
    const Eigen::MatrixXd X = migrad::standard_normal(2000, 20, 4);
    const Eigen::MatrixXd sq = migrad::pairwise_sqdist(X);
    report("kernel map 2000x2000",
           time_ms([&] { migrad::serial::kernel_from_sqdist(sq, 2.0); }, 3),
           time_ms([&] { migrad::kernel_from_sqdist(sq, 2.0); }, 3));
  }
  {
    const Eigen::MatrixXd X = migrad::standard_normal(2000, 512, 5);
    const migrad::RandomProjector projector(512, 64, 6);
    const Eigen::MatrixXd R = projector.directions();
    double sink = 0.0;  // keeps the serial loop from being optimized away
    const auto serial_project = [&] {
      Eigen::MatrixXd out(X.rows(), R.rows());
      for (int i = 0; i < X.rows(); ++i)
        for (int r = 0; r < R.rows(); ++r) {
          double s = 0.0;
          for (int c = 0; c < R.cols(); ++c) s += R(r, c) * X(i, c);
          out(i, r) = s;
        }
      sink += out(0, 0);
    };
    report("project 2000x512->64", time_ms(serial_project, 3),
           time_ms([&] { sink += projector.project(X)(0, 0); }, 3));
    if (sink == 0.12345) std::printf("unreachable %f\n", sink);
  }
  return 0;
}
