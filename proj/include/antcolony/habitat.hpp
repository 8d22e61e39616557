#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "antcolony/grid.hpp"

namespace antcolony {

/// 3x3 intensity block in raster order: NW, N, NE, W, C, E, SW, S, SE.
using Window9 = std::array<std::uint8_t, 9>;

inline constexpr std::size_t kMinHabitatSide = 3;

/// Immutable 8-bit grayscale image the colony lives on. Coordinates wrap.
class Habitat {
public:
    explicit Habitat(Gray8 pixels) : pixels_(std::move(pixels)) {
        if (pixels_.width() < kMinHabitatSide || pixels_.height() < kMinHabitatSide) {
            throw std::invalid_argument("habitat: dimensions must be at least 3x3, got " +
                                        std::to_string(pixels_.width()) + "x" +
                                        std::to_string(pixels_.height()));
        }
    }

    std::size_t width() const noexcept { return pixels_.width(); }
    std::size_t height() const noexcept { return pixels_.height(); }
    std::size_t cell_count() const noexcept { return pixels_.size(); }

    std::uint8_t at(TorusCoord c) const noexcept { return pixels_[wrap(c)]; }
    const Gray8& pixels() const noexcept { return pixels_; }

    TorusCoord wrap(TorusCoord c) const noexcept {
        return antcolony::wrap(c, static_cast<std::int64_t>(width()),
                               static_cast<std::int64_t>(height()));
    }

    /// 3x3 block centred on `c`; every neighbour is wrapped individually.
    Window9 window_at(TorusCoord c) const noexcept {
        Window9 w{};
        std::size_t k = 0;
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                w[k++] = at({c.x + dx, c.y + dy});
            }
        }
        return w;
    }

    friend bool operator==(const Habitat&, const Habitat&) = default;

private:
    Gray8 pixels_;
};

inline Habitat homogeneous_habitat(std::size_t width, std::size_t height, std::uint8_t value) {
    return Habitat(Gray8(width, height, value));
}

// ---------------------------------------------------------------------------
// PGM (P2 / P5, maxval <= 255)

class PgmError : public std::runtime_error {
public:
    enum class Code { BadMagic, BadHeader, BadMaxval, BadPixel, Truncated, TooSmall, Io };

    PgmError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const noexcept { return code_; }

private:
    Code code_;
};

namespace detail {

class PgmReader {
public:
    explicit PgmReader(std::string_view bytes) : bytes_(bytes) {}

    // Skips whitespace and '#' comments that run to end of line.
    void skip_separators() {
        while (pos_ < bytes_.size()) {
            const char ch = bytes_[pos_];
            if (ch == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                ++pos_;
            } else {
                return;
            }
        }
    }

    // Returns false at end of input; throws if the token is not an unsigned integer.
    bool next_uint(unsigned long& out, PgmError::Code code, const char* what) {
        skip_separators();
        if (pos_ >= bytes_.size()) return false;
        const char* first = bytes_.data() + pos_;
        const char* last = bytes_.data() + bytes_.size();
        auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec != std::errc{} || (ptr < last && !std::isspace(static_cast<unsigned char>(*ptr)) &&
                                  *ptr != '#')) {
            throw PgmError(code, std::string("pgm: expected unsigned integer for ") + what);
        }
        pos_ += static_cast<std::size_t>(ptr - first);
        return true;
    }

    std::size_t pos() const noexcept { return pos_; }
    void advance(std::size_t n) noexcept { pos_ += n; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
    std::string_view bytes() const noexcept { return bytes_; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

inline unsigned long require_uint(PgmReader& r, PgmError::Code code, const char* what) {
    unsigned long v = 0;
    if (!r.next_uint(v, code, what)) {
        throw PgmError(PgmError::Code::Truncated, std::string("pgm: file ends before ") + what);
    }
    return v;
}

}  // namespace detail

/// Parses an 8-bit grid from PGM bytes. Pixel values are kept as stored.
inline Gray8 parse_pgm(std::string_view bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        const std::string got(bytes.substr(0, std::min<std::size_t>(2, bytes.size())));
        throw PgmError(PgmError::Code::BadMagic,
                       "pgm: unsupported magic number '" + got + "' (expected P2 or P5)");
    }
    const bool binary = bytes[1] == '5';
    if (bytes.size() > 2 && !std::isspace(static_cast<unsigned char>(bytes[2])) && bytes[2] != '#') {
        throw PgmError(PgmError::Code::BadMagic, "pgm: malformed magic number");
    }

    detail::PgmReader r(bytes);
    r.advance(2);
    const auto width = detail::require_uint(r, PgmError::Code::BadHeader, "width");
    const auto height = detail::require_uint(r, PgmError::Code::BadHeader, "height");
    const auto maxval = detail::require_uint(r, PgmError::Code::BadMaxval, "maxval");

    if (maxval == 0 || maxval > 255) {
        throw PgmError(PgmError::Code::BadMaxval,
                       "pgm: maxval " + std::to_string(maxval) + " outside [1,255]");
    }
    if (width == 0 || height == 0) {
        throw PgmError(PgmError::Code::BadHeader, "pgm: zero image dimension");
    }

    const std::size_t count = width * height;
    std::vector<std::uint8_t> cells(count);

    if (binary) {
        // Exactly one whitespace byte separates maxval from the raster.
        if (r.remaining() == 0) {
            throw PgmError(PgmError::Code::Truncated, "pgm: missing raster data");
        }
        r.advance(1);
        if (r.remaining() < count) {
            throw PgmError(PgmError::Code::Truncated,
                           "pgm: truncated raster, expected " + std::to_string(count) +
                               " bytes, found " + std::to_string(r.remaining()));
        }
        for (std::size_t i = 0; i < count; ++i) {
            const auto v = static_cast<unsigned char>(r.bytes()[r.pos() + i]);
            if (v > maxval) {
                throw PgmError(PgmError::Code::BadPixel, "pgm: pixel value exceeds maxval");
            }
            cells[i] = v;
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            unsigned long v = 0;
            if (!r.next_uint(v, PgmError::Code::BadPixel, "pixel")) {
                throw PgmError(PgmError::Code::Truncated,
                               "pgm: truncated raster, expected " + std::to_string(count) +
                                   " values, found " + std::to_string(i));
            }
            if (v > maxval) {
                throw PgmError(PgmError::Code::BadPixel,
                               "pgm: pixel value " + std::to_string(v) + " exceeds maxval");
            }
            cells[i] = static_cast<std::uint8_t>(v);
        }
    }
    return Gray8(width, height, std::move(cells));
}

/// Parses PGM bytes into a habitat; rejects images smaller than 3x3.
inline Habitat load_pgm(std::string_view bytes) {
    Gray8 g = parse_pgm(bytes);
    if (g.width() < kMinHabitatSide || g.height() < kMinHabitatSide) {
        throw PgmError(PgmError::Code::TooSmall,
                       "pgm: habitat must be at least 3x3, got " + std::to_string(g.width()) + "x" +
                           std::to_string(g.height()));
    }
    return Habitat(std::move(g));
}

/// Binary PGM: "P5\n<w> <h>\n255\n" followed by w*h raw bytes.
inline std::string save_pgm(const Gray8& grid) {
    std::string out = "P5\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) +
                      "\n255\n";
    out.reserve(out.size() + grid.size());
    for (std::uint8_t v : grid.cells()) out.push_back(static_cast<char>(v));
    return out;
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw PgmError(PgmError::Code::Io, "cannot open '" + path.string() + "' for reading");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

inline Habitat load_pgm_file(const std::filesystem::path& path) {
    try {
        return load_pgm(read_file_bytes(path));
    } catch (const PgmError& e) {
        if (e.code() == PgmError::Code::Io) throw;
        throw PgmError(e.code(), path.string() + ": " + e.what());
    }
}

}  // namespace antcolony
