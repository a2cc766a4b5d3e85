#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace microdl {

// Counter-based random stream built on Philox4x32-10.
//
// A stream is identified by (seed, stream_id). The generator output is a pure
// function of (seed, stream_id, position), so identical seeds reproduce the
// same sequence on every platform. Child streams are keyed by index and do not
// overlap with the parent or with each other.
//
// A stream is single-owner: derive a child for every concurrent task.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  // Independent stream derived from this stream's identity (not its position).
  RngStream child(std::uint64_t index) const;

  std::uint64_t next_u64();
  // Uniform in the open interval (0, 1), 53 bits of resolution.
  double uniform();
  // Standard normal via Box-Muller; both variates of a pair are used.
  double normal();
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  // Fisher-Yates shuffle of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t position() const noexcept { return counter_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

// Raw Philox4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// SplitMix64 finalizer; used to derive child stream ids.
std::uint64_t mix64(std::uint64_t x);

}  // namespace microdl
