#include "mdrift/rng.hpp"

namespace mdrift {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t index) {
  const auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffu); };
  const auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(index), hi(index), 0x6d647269u};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t index)
    : seed_(seed), index_(index), engine_(make_engine(seed, index)) {}

void RngStream::fill_normal(std::span<double> out) {
  for (double& x : out) x = normal_(engine_);
}

}  // namespace mdrift
