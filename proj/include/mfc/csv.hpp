#pragma once

#include <string>

namespace mfc {

// Shortest round-trip decimal form of a double; keeps CSV artifacts exact
// and byte-stable across runs.
std::string csv_num(double value);

}  // namespace mfc
