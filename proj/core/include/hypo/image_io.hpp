#pragma once

// File I/O for images, masks and lifted fields.
//
// Images are quantized only here: on save values are clamped to [0,1] and
// mapped to round(v * 255) (half-up). On load an integer sample v with
// maxval M becomes v / M.
//
// Lifted fields use the "SRLF1" container: the 5 magic bytes, then N, width
// and height as little-endian uint32, then N*width*height little-endian
// IEEE-754 doubles in (r, y, x) order.

#include <cstdint>
#include <filesystem>

#include "hypo/grid.hpp"

namespace hypo {

enum class ImageFormat { Pgm, Png };

/// Picks the format from the extension (.pgm or .png, case-insensitive).
ImageFormat formatFromPath(const std::filesystem::path& path);

Image loadImage(const std::filesystem::path& path, ImageFormat format);
Image loadImage(const std::filesystem::path& path);

void saveImage(const Image& img, const std::filesystem::path& path, ImageFormat format);
void saveImage(const Image& img, const std::filesystem::path& path);

/// 8-bit quantization used by saveImage.
std::uint8_t quantize(double value) noexcept;

/// A pixel is bad iff its 8-bit value is >= 128.
Mask loadMask(const std::filesystem::path& path);
void saveMask(const Mask& mask, const std::filesystem::path& path);

inline constexpr char kLiftedMagic[] = "SRLF1";
inline constexpr std::size_t kLiftedHeaderBytes = 5 + 3 * 4;

void saveLifted(const LiftedField& field, const std::filesystem::path& path);
LiftedField loadLifted(const std::filesystem::path& path);

}  // namespace hypo
