#include "homsim/pgm.hpp"

#include <fstream>

namespace homsim {

void write_pgm(const std::string& path, int width, int height,
               const std::vector<std::uint8_t>& pixels) {
    if (pixels.size() != static_cast<std::size_t>(width) * height)
        throw ConfigError("write_pgm: pixel count does not match dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("write_pgm: cannot open " + path);
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    if (!out) throw ConfigError("write_pgm: write failed for " + path);
}

std::vector<std::uint8_t> read_pgm(const std::string& path, int& width, int& height) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("read_pgm: cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw ConfigError("read_pgm: not a binary PGM: " + path);
    // skip whitespace and '#' comment lines between header tokens
    auto next_int = [&in, &path]() {
        int c = in.peek();
        while (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '#') {
            if (c == '#') in.ignore(1 << 20, '\n');
            else in.get();
            c = in.peek();
        }
        int v = -1;
        in >> v;
        if (!in) throw ConfigError("read_pgm: truncated header: " + path);
        return v;
    };
    width = next_int();
    height = next_int();
    int maxval = next_int();
    if (width <= 0 || height <= 0 || maxval != 255)
        throw ConfigError("read_pgm: unsupported PGM (need 8-bit): " + path);
    in.get();  // single whitespace after maxval
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width) * height);
    in.read(reinterpret_cast<char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(pixels.size()))
        throw ConfigError("read_pgm: truncated pixel data: " + path);
    return pixels;
}

}  // namespace homsim
