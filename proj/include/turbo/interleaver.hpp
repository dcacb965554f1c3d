#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace turbo {

enum class InterleaverKind { qpp, seeded_random };

inline const char* to_string(InterleaverKind k) {
  return k == InterleaverKind::qpp ? "qpp" : "seeded_random";
}

/// Deterministic permutation of block length k with its inverse.
/// Convention everywhere: output[i] = input[pi[i]].
class Interleaver {
 public:
  /// QPP permutation pi[i] = (f1*i + f2*i^2) mod k with the 3GPP
  /// parameter pair for k. Throws for k outside the parameter table.
  static Interleaver qpp(int k);

  /// Uniformly random permutation fixed by (k, seed).
  static Interleaver seeded_random(int k, std::uint64_t seed);

  int size() const { return static_cast<int>(pi_.size()); }
  InterleaverKind kind() const { return kind_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

  const std::vector<int>& pi() const { return pi_; }
  const std::vector<int>& pi_inv() const { return pi_inv_; }

  template <typename T>
  std::vector<T> interleave(std::span<const T> in) const {
    check_len(in.size());
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[pi_[i]];
    return out;
  }

  template <typename T>
  std::vector<T> deinterleave(std::span<const T> in) const {
    check_len(in.size());
    std::vector<T> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[pi_inv_[i]];
    return out;
  }

  template <typename T>
  void interleave_into(std::span<const T> in, std::span<T> out) const {
    check_len(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[pi_[i]];
  }

  template <typename T>
  void deinterleave_into(std::span<const T> in, std::span<T> out) const {
    check_len(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[pi_inv_[i]];
  }

 private:
  Interleaver(InterleaverKind kind, std::vector<int> pi, std::optional<std::uint64_t> seed);

  void check_len(std::size_t n) const {
    if (n != pi_.size())
      throw std::invalid_argument("interleaver: sequence length " + std::to_string(n) +
                                  " does not match block length " + std::to_string(pi_.size()));
  }

  InterleaverKind kind_;
  std::vector<int> pi_;
  std::vector<int> pi_inv_;
  std::optional<std::uint64_t> seed_;
};

/// True when the 3GPP parameter table has an entry for k.
bool qpp_supported(int k);

/// (f1, f2) for a supported k; throws otherwise.
std::pair<int, int> qpp_parameters(int k);

Interleaver make_interleaver(int k, InterleaverKind kind,
                             std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace turbo
