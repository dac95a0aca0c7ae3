#pragma once

#include <cstdint>
#include <vector>

namespace radpipe {

// Square 8-bit gray image, row-major.
struct Image {
  int side = 0;
  std::vector<uint8_t> px;

  Image() = default;
  explicit Image(int n) : side(n), px(static_cast<size_t>(n) * n, 0) {}

  uint8_t at(int r, int c) const { return px[static_cast<size_t>(r) * side + c]; }
  uint8_t& at(int r, int c) { return px[static_cast<size_t>(r) * side + c]; }

  bool operator==(const Image&) const = default;
};

}  // namespace radpipe
