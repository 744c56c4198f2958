#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace migrad {

// splitmix64 finalizer; mixes a seed with stream tags so that derived
// streams (per grid point, per repeat, per noise batch) are decorrelated.
inline std::uint64_t mix_seed(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix_seed(seed ^ (0x9e3779b97f4a7c15ULL + mix_seed(tag)));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag1,
                              std::uint64_t tag2) {
  return mix_seed(mix_seed(seed, tag1), tag2);
}

// n x d matrix of i.i.d. standard normal draws from a fresh engine.
inline Eigen::MatrixXd standard_normal(int n, int d, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd out(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = normal(engine);
  return out;
}

inline Eigen::VectorXd standard_normal_vector(int d, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd out(d);
  for (int j = 0; j < d; ++j) out(j) = normal(engine);
  return out;
}

}  // namespace migrad
