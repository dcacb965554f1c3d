#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace turbo {

/// Bit files: one block per line, characters '0'/'1'.
/// LLR files: one block per line, space-separated decimal floats.
/// Readers throw std::runtime_error naming line and offset on bad input;
/// expected_len 0 skips the length check.

std::vector<std::vector<std::uint8_t>> read_bit_blocks(std::istream& is, int expected_len);
std::vector<std::vector<std::uint8_t>> read_bit_file(const std::string& path, int expected_len);
void write_bit_blocks(std::ostream& os, const std::vector<std::vector<std::uint8_t>>& blocks);

std::vector<std::vector<double>> read_llr_blocks(std::istream& is, int expected_len);
std::vector<std::vector<double>> read_llr_file(const std::string& path, int expected_len);
void write_llr_blocks(std::ostream& os, const std::vector<std::vector<double>>& blocks);

}  // namespace turbo
