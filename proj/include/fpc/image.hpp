#pragma once

#include <cstddef>
#include <filesystem>

#include "fpc/vector.hpp"

namespace fpc {

/// Row-major greyscale grid. `pixels.size() == height * width` always holds
/// for images built through the constructor.
struct Image {
    std::size_t height = 0;
    std::size_t width = 0;
    Vector pixels;

    Image() = default;
    Image(std::size_t h, std::size_t w, double fill = 0.0);
    Image(std::size_t h, std::size_t w, Vector data);

    double& at(std::size_t r, std::size_t c) { return pixels[r * width + c]; }
    double at(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }
    std::size_t size() const { return pixels.size(); }
};

/// Reads a binary 8-bit PGM (P5). Values are rescaled from [0, maxval] to [0, 1].
Image read_pgm(const std::filesystem::path& path);

/// Writes a binary 8-bit PGM. Values are clamped to [0, 1] and rescaled to [0, 255].
void write_pgm(const std::filesystem::path& path, const Image& image);

}  // namespace fpc
