#include "berest/rng.hpp"

#include <stdexcept>

namespace berest {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  const std::uint32_t out0 = hi1 ^ ctr[1] ^ key[0];
  const std::uint32_t out2 = hi0 ^ ctr[3] ^ key[1];
  ctr[0] = out0;
  ctr[1] = lo1;
  ctr[2] = out2;
  ctr[3] = lo0;
}

inline void philox4x32_10(std::uint32_t ctr[4], std::uint32_t k0,
                          std::uint32_t k1) {
  std::uint32_t key[2] = {k0, k1};
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    philox_round(ctr, key);
  }
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t key, std::uint64_t stream)
    : key_(key), stream_(stream) {}

void RngStream::refill() {
  std::uint32_t ctr[4] = {
      static_cast<std::uint32_t>(block_),
      static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(stream_),
      static_cast<std::uint32_t>(stream_ >> 32),
  };
  philox4x32_10(ctr, static_cast<std::uint32_t>(key_),
                static_cast<std::uint32_t>(key_ >> 32));
  buf_[0] = ctr[0];
  buf_[1] = ctr[1];
  buf_[2] = ctr[2];
  buf_[3] = ctr[3];
  buf_pos_ = 0;
  ++block_;
}

std::uint32_t RngStream::next_u32() {
  if (buf_pos_ >= 4) refill();
  return buf_[buf_pos_++];
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // u1 in (0,1] so the log is finite.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 6.283185307179586476925286766559 * u2;
  spare_normal_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());  // full range
  // Rejection sampling over the largest multiple of span.
  const std::uint64_t limit = (~std::uint64_t{0} / span) * span;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return lo + static_cast<std::int64_t>(v % span);
}

RngStream RngStream::child(std::uint64_t index) const {
  return RngStream(key_, mix64(stream_ ^ mix64(index + 1)));
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_id) {
  return mix64(master_seed ^ mix64(run_id));
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t run_id,
                        StreamPurpose purpose) {
  return run_stream(derive_run_seed(master_seed, run_id), purpose);
}

RngStream run_stream(std::uint64_t run_seed, StreamPurpose purpose) {
  return RngStream(run_seed, static_cast<std::uint64_t>(purpose));
}

}  // namespace berest
