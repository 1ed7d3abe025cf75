#pragma once
// Counter-based deterministic random streams. Every task derives its own
// stream from (master seed, task index), so results are independent of thread
// scheduling and worker count.

#include <cstdint>

#include "bpl/util.hpp"

namespace bpl {

inline uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

class RngStream {
 public:
  static RngStream from(uint64_t seed, uint64_t task_index) {
    RngStream s;
    s.state_ = mix64(seed + 0x9e3779b97f4a7c15ULL * (task_index + 1));
    return s;
  }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  // Uniform in [0, 1).
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  int sign() { return (next_u64() >> 63) ? -1 : 1; }

  // Uniform angle in [0, 2*pi).
  double angle() { return kTwoPi * uniform(); }

  cplx on_circle() {
    double t = angle();
    return {std::cos(t), std::sin(t)};
  }

 private:
  uint64_t state_ = 0;
};

}  // namespace bpl
