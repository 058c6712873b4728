#pragma once

#include <string>
#include <vector>

#include "igamg/assembly.hpp"

namespace igamg {

/// "cube", "lshape" or "ring" with k uniform spans and degree p per
/// direction (k in 4..96, p in 2..6). Throws std::invalid_argument for
/// anything else.
Problem build_benchmark(const std::string& name, int k, int p);

std::vector<std::string> benchmark_names();

}  // namespace igamg
