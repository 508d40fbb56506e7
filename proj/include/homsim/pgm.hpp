#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "homsim/common.hpp"

namespace homsim {

// Binary 8-bit PGM (P5, maxval 255). Row-major, top row first.
void write_pgm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& pixels);
std::vector<std::uint8_t> read_pgm(const std::string& path, int& width, int& height);

}  // namespace homsim
