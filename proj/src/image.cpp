#include "mirrorcast/image.hpp"

#include <png.h>

#include <algorithm>
#include <cstdlib>
#include <cstring>

namespace mirrorcast::image {

namespace {

constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

bool pixel_differs(const std::uint8_t* p, const std::uint8_t* q, int tolerance) {
    for (int c = 0; c < 4; ++c)
        if (std::abs(int(p[c]) - int(q[c])) > tolerance) return true;
    return false;
}

}  // namespace

std::optional<std::pair<int, int>> png_dimensions(std::span<const std::uint8_t> png) {
    if (png.size() < 24 || std::memcmp(png.data(), kSignature, 8) != 0) return std::nullopt;
    auto be32 = [&](std::size_t off) {
        return int(png[off]) << 24 | int(png[off + 1]) << 16 | int(png[off + 2]) << 8 | int(png[off + 3]);
    };
    return std::pair{be32(16), be32(20)};
}

std::optional<Raster> decode_png(std::span<const std::uint8_t> png) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, png.data(), png.size())) return std::nullopt;
    img.format = PNG_FORMAT_RGBA;
    Raster r;
    r.width = static_cast<int>(img.width);
    r.height = static_cast<int>(img.height);
    r.rgba.resize(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, r.rgba.data(), 0, nullptr)) {
        png_image_free(&img);
        return std::nullopt;
    }
    return r;
}

std::vector<std::uint8_t> encode_png(const Raster& raster) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(raster.width);
    img.height = static_cast<png_uint_32>(raster.height);
    img.format = PNG_FORMAT_RGBA;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&img, nullptr, &size, 0, raster.rgba.data(), 0, nullptr)) return {};
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&img, out.data(), &size, 0, raster.rgba.data(), 0, nullptr)) return {};
    out.resize(size);
    return out;
}

std::size_t count_differing_pixels_serial(const Raster& a, const Raster& b, int tolerance) {
    const int w = std::max(a.width, b.width);
    const int h = std::max(a.height, b.height);
    std::size_t diff = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const bool inA = x < a.width && y < a.height;
            const bool inB = x < b.width && y < b.height;
            if (!inA || !inB) {
                ++diff;
                continue;
            }
            const auto* p = &a.rgba[(static_cast<std::size_t>(y) * a.width + x) * 4];
            const auto* q = &b.rgba[(static_cast<std::size_t>(y) * b.width + x) * 4];
            if (pixel_differs(p, q, tolerance)) ++diff;
        }
    }
    return diff;
}

std::size_t count_differing_pixels(const Raster& a, const Raster& b, int tolerance) {
    const int w = std::max(a.width, b.width);
    const int h = std::max(a.height, b.height);
    const int commonW = std::min(a.width, b.width);
    const int commonH = std::min(a.height, b.height);
    // Everything outside the overlap differs by definition.
    std::size_t diff = static_cast<std::size_t>(w) * h - static_cast<std::size_t>(commonW) * commonH;

    long long overlapDiff = 0;
#pragma omp parallel for reduction(+ : overlapDiff) schedule(static)
    for (int y = 0; y < commonH; ++y) {
        const auto* rowA = &a.rgba[static_cast<std::size_t>(y) * a.width * 4];
        const auto* rowB = &b.rgba[static_cast<std::size_t>(y) * b.width * 4];
        long long rowDiff = 0;
        for (int x = 0; x < commonW; ++x)
            rowDiff += pixel_differs(rowA + x * 4, rowB + x * 4, tolerance) ? 1 : 0;
        overlapDiff += rowDiff;
    }
    return diff + static_cast<std::size_t>(overlapDiff);
}

double differing_fraction(const Raster& a, const Raster& b, int tolerance) {
    const double total = double(std::max(a.width, b.width)) * double(std::max(a.height, b.height));
    if (total == 0) return 0.0;
    return double(count_differing_pixels(a, b, tolerance)) / total;
}

bool is_uniform_serial(const Raster& r) {
    if (r.pixels() == 0) return true;
    for (std::size_t i = 1; i < r.pixels(); ++i)
        if (std::memcmp(&r.rgba[i * 4], r.rgba.data(), 4) != 0) return false;
    return true;
}

bool is_uniform(const Raster& r) {
    const long long n = static_cast<long long>(r.pixels());
    if (n == 0) return true;
    const std::uint8_t* first = r.rgba.data();
    int mismatch = 0;
#pragma omp parallel for reduction(| : mismatch) schedule(static)
    for (long long i = 1; i < n; ++i)
        mismatch |= std::memcmp(&r.rgba[static_cast<std::size_t>(i) * 4], first, 4) != 0 ? 1 : 0;
    return mismatch == 0;
}

}  // namespace mirrorcast::image
