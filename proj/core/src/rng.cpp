#include "vrjp/rng.hpp"

#include <bit>
#include <cmath>

namespace vrjp {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += kGoldenGamma);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix64(std::uint64_t x) { return splitmix64_next(x); }

RngStream::RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
    : seed_(seed), path_(path) {
  init();
}

RngStream::RngStream(std::uint64_t seed, std::span<const std::uint64_t> path)
    : seed_(seed), path_(path.begin(), path.end()) {
  init();
}

void RngStream::init() {
  // Path elements are folded in order, each through a full avalanche, so
  // {a, b} and {b, a} land on unrelated keys.
  std::uint64_t key = mix64(seed_);
  for (std::uint64_t p : path_) key = mix64(key ^ mix64(p + 0x632BE59BD9B4E019ULL));
  std::uint64_t sm = key;
  for (auto& s : s_) s = splitmix64_next(sm);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

RngStream::result_type RngStream::operator()() {
  const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential(double rate) { return -std::log(uniform_open()) / rate; }

bool RngStream::bernoulli(double p) { return uniform() < p; }

RngStream RngStream::substream(std::uint64_t index) const {
  std::vector<std::uint64_t> child = path_;
  child.push_back(index);
  return RngStream(seed_, std::span<const std::uint64_t>(child));
}

}  // namespace vrjp
