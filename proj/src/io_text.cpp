#include "turbo/io_text.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace turbo {

namespace {

[[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line) + ", offset " + std::to_string(column) +
                           ": " + what);
}

void check_len(std::size_t line, std::size_t got, int expected) {
  if (expected > 0 && got != static_cast<std::size_t>(expected))
    throw std::runtime_error("line " + std::to_string(line) + ": expected " +
                             std::to_string(expected) + " values, got " + std::to_string(got));
}

}  // namespace

std::vector<std::vector<std::uint8_t>> read_bit_blocks(std::istream& is, int expected_len) {
  std::vector<std::vector<std::uint8_t>> blocks;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::uint8_t> bits;
    bits.reserve(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (c == '0' || c == '1')
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
      else if (c != ' ' && c != '\t')
        fail(lineno, i + 1, std::string("invalid character '") + c + "' in bit block");
    }
    check_len(lineno, bits.size(), expected_len);
    blocks.push_back(std::move(bits));
  }
  return blocks;
}

std::vector<std::vector<std::uint8_t>> read_bit_file(const std::string& path, int expected_len) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open bit file: " + path);
  return read_bit_blocks(is, expected_len);
}

void write_bit_blocks(std::ostream& os, const std::vector<std::vector<std::uint8_t>>& blocks) {
  for (const auto& b : blocks) {
    for (const auto bit : b) os << static_cast<char>('0' + (bit & 1));
    os << '\n';
  }
}

std::vector<std::vector<double>> read_llr_blocks(std::istream& is, int expected_len) {
  std::vector<std::vector<double>> blocks;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      double v;
      const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
      if (ec != std::errc() || ptr != line.data() + end)
        fail(lineno, pos + 1, "invalid number '" + line.substr(pos, end - pos) + "'");
      vals.push_back(v);
      pos = end;
    }
    if (vals.empty()) continue;
    check_len(lineno, vals.size(), expected_len);
    blocks.push_back(std::move(vals));
  }
  return blocks;
}

std::vector<std::vector<double>> read_llr_file(const std::string& path, int expected_len) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open LLR file: " + path);
  return read_llr_blocks(is, expected_len);
}

void write_llr_blocks(std::ostream& os, const std::vector<std::vector<double>>& blocks) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (i) buf << ' ';
      buf << b[i];
    }
    buf << '\n';
  }
  os << buf.str();
}

}  // namespace turbo
