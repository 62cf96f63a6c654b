#include "mbl/image_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "mbl/errors.hpp"

namespace mbl {

namespace {

// Skips whitespace and `#` comment lines between PNM header tokens.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (!isspace(c)) {
            tok.push_back(char(c));
            break;
        }
    }
    while ((c = in.get()) != EOF && !isspace(c)) tok.push_back(char(c));
    if (tok.empty()) throw FormatError("unexpected end of PNM header");
    return tok;
}

int parse_int(const std::string& s, const char* what) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw FormatError(std::string("bad ") + what);
        return v;
    } catch (const FormatError&) {
        throw;
    } catch (...) {
        throw FormatError(std::string("bad ") + what + " in PNM header");
    }
}

} // namespace

void write_pgm(const std::string& path, const Image8& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              std::streamsize(img.data.size()));
    if (!out) throw FormatError("short write: " + path);
}

Image8 read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open: " + path);
    if (next_token(in) != "P5") throw FormatError("not a binary PGM (P5): " + path);
    int w = parse_int(next_token(in), "width");
    int h = parse_int(next_token(in), "height");
    int maxval = parse_int(next_token(in), "maxval");
    if (w <= 0 || h <= 0) throw FormatError("bad PGM dimensions: " + path);
    if (maxval != 255) throw FormatError("unsupported PGM maxval (expect 255): " + path);
    Image8 img(w, h);
    in.read(reinterpret_cast<char*>(img.data.data()), std::streamsize(img.data.size()));
    if (in.gcount() != std::streamsize(img.data.size()))
        throw FormatError("truncated PGM payload: " + path);
    return img;
}

void write_pfm(const std::string& path, const ImageF& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    out << "Pf\n" << img.width << " " << img.height << "\n-1.0\n";
    // bottom row first per PFM convention
    for (int y = img.height - 1; y >= 0; --y) {
        out.write(reinterpret_cast<const char*>(&img.data[size_t(y) * img.width]),
                  std::streamsize(sizeof(float) * img.width));
    }
    if (!out) throw FormatError("short write: " + path);
}

ImageF read_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open: " + path);
    std::string magic = next_token(in);
    if (magic != "Pf") throw FormatError("not a grayscale PFM (Pf): " + path);
    int w = parse_int(next_token(in), "width");
    int h = parse_int(next_token(in), "height");
    double scale = 0.0;
    try {
        scale = std::stod(next_token(in));
    } catch (...) {
        throw FormatError("bad PFM scale: " + path);
    }
    if (w <= 0 || h <= 0) throw FormatError("bad PFM dimensions: " + path);
    if (scale >= 0) throw FormatError("big-endian PFM unsupported: " + path);
    ImageF img(w, h);
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(&img.data[size_t(y) * w]),
                std::streamsize(sizeof(float) * w));
        if (in.gcount() != std::streamsize(sizeof(float) * w))
            throw FormatError("truncated PFM payload: " + path);
    }
    return img;
}

} // namespace mbl
