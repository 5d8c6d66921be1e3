#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mirrorcast::image {

/// 8-bit RGBA raster, row-major, no padding.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgba;

    std::size_t pixels() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
};

/// Width/height from the IHDR chunk without decoding. nullopt if not a PNG.
std::optional<std::pair<int, int>> png_dimensions(std::span<const std::uint8_t> png);

std::optional<Raster> decode_png(std::span<const std::uint8_t> png);
std::vector<std::uint8_t> encode_png(const Raster& raster);

/// Number of pixels (over the union of both extents, top-left aligned) whose
/// channels differ by more than `tolerance`. Pixels outside either image count
/// as differing.
std::size_t count_differing_pixels(const Raster& a, const Raster& b, int tolerance = 0);
std::size_t count_differing_pixels_serial(const Raster& a, const Raster& b, int tolerance = 0);

/// count_differing_pixels / union pixel count.
double differing_fraction(const Raster& a, const Raster& b, int tolerance = 0);

/// True if every pixel equals the first one (blank page detection).
bool is_uniform(const Raster& r);
bool is_uniform_serial(const Raster& r);

}  // namespace mirrorcast::image
