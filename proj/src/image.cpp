#include "fpc/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include "fpc/errors.hpp"

namespace fpc {

Image::Image(std::size_t h, std::size_t w, double fill) : height(h), width(w), pixels(h * w, fill) {
    if (h == 0 || w == 0) throw InputError("Image: dimensions must be positive");
}

Image::Image(std::size_t h, std::size_t w, Vector data) : height(h), width(w), pixels(std::move(data)) {
    if (h == 0 || w == 0) throw InputError("Image: dimensions must be positive");
    require_same_size(h * w, pixels.size(), "Image");
}

namespace {

// Next whitespace-separated header token, skipping '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    char c;
    while (in.get(c)) {
        if (c == '#') {
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(c);
    }
    return tok;
}

std::size_t parse_header_int(std::istream& in, const char* field) {
    const std::string tok = next_token(in);
    try {
        std::size_t pos = 0;
        const long v = std::stol(tok, &pos);
        if (pos != tok.size() || v <= 0) throw InputError("");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw InputError(std::string("read_pgm: bad ") + field + " '" + tok + "'");
    }
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("read_pgm: cannot open " + path.string());
    if (next_token(in) != "P5") throw InputError("read_pgm: not a binary PGM (P5): " + path.string());
    const std::size_t w = parse_header_int(in, "width");
    const std::size_t h = parse_header_int(in, "height");
    const std::size_t maxval = parse_header_int(in, "maxval");
    if (maxval > 255) throw InputError("read_pgm: only 8-bit PGM is supported");

    std::vector<unsigned char> raw(w * h);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw InputError("read_pgm: truncated pixel data in " + path.string());

    Image img(h, w);
    for (std::size_t i = 0; i < raw.size(); ++i)
        img.pixels[i] = static_cast<double>(raw[i]) / static_cast<double>(maxval);
    return img;
}

void write_pgm(const std::filesystem::path& path, const Image& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("write_pgm: cannot open " + path.string());
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    std::vector<unsigned char> raw(image.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const double v = std::clamp(image.pixels[i], 0.0, 1.0);
        raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

}  // namespace fpc
