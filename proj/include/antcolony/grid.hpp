#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace antcolony {

/// Cell position on the lattice. Coordinates are unbounded until wrapped.
struct TorusCoord {
    std::int64_t x = 0;
    std::int64_t y = 0;

    friend bool operator==(const TorusCoord&, const TorusCoord&) = default;
};

/// Canonical form of `c` on a `width` x `height` torus (non-negative modulus).
constexpr TorusCoord wrap(TorusCoord c, std::int64_t width, std::int64_t height) noexcept {
    auto mod = [](std::int64_t v, std::int64_t m) {
        const std::int64_t r = v % m;
        return r < 0 ? r + m : r;
    };
    return {mod(c.x, width), mod(c.y, height)};
}

/// Dense row-major 2-D grid. Row 0 is the top row.
template <typename T>
class Grid {
public:
    Grid() = default;

    Grid(std::size_t width, std::size_t height, T fill = T{})
        : width_(width), height_(height), cells_(width * height, fill) {}

    Grid(std::size_t width, std::size_t height, std::vector<T> cells)
        : width_(width), height_(height), cells_(std::move(cells)) {
        if (cells_.size() != width_ * height_) {
            throw std::invalid_argument("grid: cell count does not match dimensions");
        }
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return cells_.size(); }

    std::size_t index(std::size_t x, std::size_t y) const noexcept { return y * width_ + x; }
    std::size_t index(TorusCoord c) const noexcept {
        return index(static_cast<std::size_t>(c.x), static_cast<std::size_t>(c.y));
    }

    T& operator()(std::size_t x, std::size_t y) noexcept { return cells_[index(x, y)]; }
    const T& operator()(std::size_t x, std::size_t y) const noexcept { return cells_[index(x, y)]; }

    // Canonical coordinates only.
    T& operator[](TorusCoord c) noexcept { return cells_[index(c)]; }
    const T& operator[](TorusCoord c) const noexcept { return cells_[index(c)]; }

    T& operator[](std::size_t i) noexcept { return cells_[i]; }
    const T& operator[](std::size_t i) const noexcept { return cells_[i]; }

    std::span<T> cells() noexcept { return cells_; }
    std::span<const T> cells() const noexcept { return cells_; }

    TorusCoord coord_of(std::size_t i) const noexcept {
        return {static_cast<std::int64_t>(i % width_), static_cast<std::int64_t>(i / width_)};
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<T> cells_;
};

using Gray8 = Grid<std::uint8_t>;

}  // namespace antcolony
