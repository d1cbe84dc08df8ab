#pragma once

#include <filesystem>

#include "leafkit/types.hpp"

namespace leafkit {

/// Reads `.png` (any PNG colour type, converted to 8-bit RGB) or binary
/// `.ppm` / `.pgm`. Throws IoError on missing or unreadable files.
RgbImage read_image(const std::filesystem::path& path);

/// Writes `.png` or `.ppm`, chosen by extension.
void write_image(const std::filesystem::path& path, const RgbImage& image);

}  // namespace leafkit
