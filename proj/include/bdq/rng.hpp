#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "bdq/types.hpp"

namespace bdq {

/// splitmix64 step; used to derive independent substreams from one root seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic substream seed from a root seed and a path of stream ids,
/// independent of the order trials actually execute in.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = root ^ 0x243f6a8885a308d3ULL;
  splitmix64(s);
  for (std::uint64_t id : path) {
    s ^= id + 0x452821e638d01377ULL;
    splitmix64(s);
  }
  return splitmix64(s);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

/// CN(0,1) vector: real and imaginary parts independent N(0, 1/2).
inline ComplexVector complex_gaussian(Eigen::Index n, std::mt19937_64& eng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ComplexVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double re = g(eng);
    double im = g(eng);
    v[i] = Complex(re, im);
  }
  return v;
}

inline ComplexVector random_unit(Eigen::Index n, std::mt19937_64& eng) {
  ComplexVector v = complex_gaussian(n, eng);
  double nv = v.norm();
  if (nv == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / nv;
}

}  // namespace bdq
