#pragma once

#include <string>

#include "oac/trainer.hpp"

namespace oac {

// Final-parameter export: a flat little-endian float64 dump (params.bin)
// plus a JSON manifest of tensor names, shapes and offsets (params.json).
// Matrices are written row-major; tensor order is policy trunk, then
// critic online 1, online 2, target 1, target 2, each as W then b per
// layer. Adam state is not persisted.
void save_agent(const Agent& agent, const std::string& bin_path,
                const std::string& manifest_path);

// Rebuilds an agent (fresh optimizer state) from a dump pair. Validates
// shapes and total element count against the manifest.
Agent load_agent(const std::string& bin_path, const std::string& manifest_path);

}  // namespace oac
