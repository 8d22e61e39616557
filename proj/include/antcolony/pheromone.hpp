#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <string_view>

#include "antcolony/grid.hpp"

namespace antcolony {

/// Per-cell pheromone concentration. Every cell stays >= 0.
class PheromoneField {
public:
    PheromoneField(std::size_t width, std::size_t height) : sigma_(width, height, 0.0) {}

    std::size_t width() const noexcept { return sigma_.width(); }
    std::size_t height() const noexcept { return sigma_.height(); }

    double at(TorusCoord c) const noexcept { return sigma_[c]; }
    double operator[](std::size_t i) const noexcept { return sigma_[i]; }
    std::span<const double> cells() const noexcept { return sigma_.cells(); }
    const Grid<double>& grid() const noexcept { return sigma_; }

    void deposit(TorusCoord c, double amount) {
        if (!(amount >= 0.0)) {
            throw std::invalid_argument("deposit: amount must be non-negative");
        }
        sigma_[c] += amount;
    }

    /// Multiplicative decay sigma <- (1 - k) sigma.
    void evaporate(double k) {
        if (!(k >= 0.0 && k < 1.0)) {
            throw std::invalid_argument("evaporate: rate must lie in [0, 1)");
        }
        const double keep = 1.0 - k;
        for (double& s : sigma_.cells()) s *= keep;
    }

    /// Row-major sum.
    double total() const noexcept {
        double sum = 0.0;
        for (double s : sigma_.cells()) sum += s;
        return sum;
    }

    double max() const noexcept {
        double m = 0.0;
        for (double s : sigma_.cells()) m = std::max(m, s);
        return m;
    }

    /// Multiplies the whole field by `factor` (> 0). Used for scale tests and rescaling.
    void scale(double factor) {
        if (!(factor > 0.0)) throw std::invalid_argument("scale: factor must be positive");
        for (double& s : sigma_.cells()) s *= factor;
    }

    friend bool operator==(const PheromoneField&, const PheromoneField&) = default;

private:
    Grid<double> sigma_;
};

/// 8-bit codification of the field: round-half-up of 255 * sigma / max(sigma).
/// An all-zero field maps to black.
inline Gray8 snapshot(const PheromoneField& f) {
    Gray8 out(f.width(), f.height(), 0);
    const double peak = f.max();
    if (peak <= 0.0) return out;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = std::floor(255.0 * (f[i] / peak) + 0.5);
        out[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
    return out;
}

// Raw dump: u32 width, u32 height, then width*height IEEE-754 doubles, all little-endian.

namespace detail {

template <typename T>
void put_le(std::string& out, T value) {
    static_assert(std::is_unsigned_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
    }
}

template <typename T>
T get_le(std::string_view in, std::size_t offset) {
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value |= static_cast<T>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
    }
    return value;
}

}  // namespace detail

inline std::string dump_field(const PheromoneField& f) {
    std::string out;
    out.reserve(8 + 8 * f.width() * f.height());
    detail::put_le(out, static_cast<std::uint32_t>(f.width()));
    detail::put_le(out, static_cast<std::uint32_t>(f.height()));
    for (double s : f.cells()) detail::put_le(out, std::bit_cast<std::uint64_t>(s));
    return out;
}

inline PheromoneField load_field_dump(std::string_view bytes) {
    if (bytes.size() < 8) throw std::runtime_error("field dump: missing header");
    const auto w = detail::get_le<std::uint32_t>(bytes, 0);
    const auto h = detail::get_le<std::uint32_t>(bytes, 4);
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (bytes.size() != 8 + 8 * n) throw std::runtime_error("field dump: size mismatch");
    PheromoneField f(w, h);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::bit_cast<double>(detail::get_le<std::uint64_t>(bytes, 8 + 8 * i));
        if (!(s >= 0.0)) throw std::runtime_error("field dump: negative or NaN concentration");
        f.deposit(f.grid().coord_of(i), s);
    }
    return f;
}

}  // namespace antcolony
