#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mdrift {

/// Independent Gaussian substream identified by (master seed, stream index).
///
/// Experiments assign stream index = repetition * N + copy, so every path of
/// every repetition can be regenerated on its own.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }

  double normal() { return normal_(engine_); }
  void fill_normal(std::span<double> out);

 private:
  std::uint64_t seed_;
  std::uint64_t index_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace mdrift
