#include "turbo/interleaver.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "turbo/rng.hpp"

namespace turbo {

namespace {

struct QppEntry {
  int k;
  int f1;
  int f2;
};

// 3GPP TS 36.212 table 5.1.3-3 (block sizes 40..512)
constexpr QppEntry kQppTable[] = {
    {40, 3, 10},    {48, 7, 12},    {56, 19, 42},   {64, 7, 16},    {72, 7, 18},
    {80, 11, 20},   {88, 5, 22},    {96, 11, 24},   {104, 7, 26},   {112, 41, 84},
    {120, 103, 90}, {128, 15, 32},  {136, 9, 34},   {144, 17, 108}, {152, 9, 38},
    {160, 21, 120}, {168, 101, 84}, {176, 21, 44},  {184, 57, 46},  {192, 23, 48},
    {200, 13, 50},  {208, 27, 52},  {216, 11, 36},  {224, 27, 56},  {232, 85, 58},
    {240, 29, 60},  {248, 33, 62},  {256, 15, 32},  {264, 17, 198}, {272, 33, 68},
    {280, 103, 210},{288, 19, 36},  {296, 19, 74},  {304, 37, 76},  {312, 19, 78},
    {320, 21, 120}, {328, 21, 82},  {336, 115, 84}, {344, 193, 86}, {352, 21, 44},
    {360, 133, 90}, {368, 81, 46},  {376, 45, 94},  {384, 23, 48},  {392, 243, 98},
    {400, 151, 40}, {408, 155, 102},{416, 25, 52},  {424, 51, 106}, {432, 47, 72},
    {440, 91, 110}, {448, 29, 168}, {456, 29, 114}, {464, 247, 58}, {472, 29, 118},
    {480, 89, 180}, {488, 91, 122}, {496, 157, 62}, {504, 55, 84},  {512, 31, 64},
};

const QppEntry* find_entry(int k) {
  for (const auto& e : kQppTable)
    if (e.k == k) return &e;
  return nullptr;
}

std::vector<int> invert(const std::vector<int>& pi) {
  std::vector<int> inv(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) inv[pi[i]] = static_cast<int>(i);
  return inv;
}

}  // namespace

bool qpp_supported(int k) { return find_entry(k) != nullptr; }

std::pair<int, int> qpp_parameters(int k) {
  const QppEntry* e = find_entry(k);
  if (!e)
    throw std::invalid_argument("no QPP interleaver parameters for k=" + std::to_string(k) +
                                "; use the seeded_random interleaver instead");
  return {e->f1, e->f2};
}

Interleaver::Interleaver(InterleaverKind kind, std::vector<int> pi,
                         std::optional<std::uint64_t> seed)
    : kind_(kind), pi_(std::move(pi)), pi_inv_(invert(pi_)), seed_(seed) {}

Interleaver Interleaver::qpp(int k) {
  auto [f1, f2] = qpp_parameters(k);
  std::vector<int> pi(k);
  for (int i = 0; i < k; ++i) {
    const std::uint64_t x = static_cast<std::uint64_t>(i);
    pi[i] = static_cast<int>((static_cast<std::uint64_t>(f1) * x +
                              static_cast<std::uint64_t>(f2) * x % k * x) %
                             static_cast<std::uint64_t>(k));
  }
  return Interleaver(InterleaverKind::qpp, std::move(pi), std::nullopt);
}

Interleaver Interleaver::seeded_random(int k, std::uint64_t seed) {
  std::vector<int> pi(k);
  std::iota(pi.begin(), pi.end(), 0);
  Rng rng(derive_seed(seed, 0x70657273ULL));
  rng.shuffle(std::span<int>(pi));
  return Interleaver(InterleaverKind::seeded_random, std::move(pi), seed);
}

Interleaver make_interleaver(int k, InterleaverKind kind, std::optional<std::uint64_t> seed) {
  if (k < 8) throw std::invalid_argument("interleaver length must be at least 8");
  if (kind == InterleaverKind::qpp) return Interleaver::qpp(k);
  return Interleaver::seeded_random(k, seed.value_or(0));
}

}  // namespace turbo
