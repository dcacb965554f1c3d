#pragma once

#include <iosfwd>
#include <string>

#include "turbo/turbonet.hpp"

namespace turbo {

inline constexpr int kWeightFormatVersion = 1;

/// JSON weight document. Only the families of the variant are stored;
/// gw arrays hold the 24 present slots per stage in packing order.
void save_weights(std::ostream& os, const WeightSet& ws);
void save_weights_file(const std::string& path, const WeightSet& ws);

WeightSet load_weights(std::istream& is);
WeightSet load_weights_file(const std::string& path);

/// Human-readable one-line summary of the metadata (used in mismatch
/// diagnostics and CSV comments).
std::string describe_weights(const WeightSet& ws);

}  // namespace turbo
