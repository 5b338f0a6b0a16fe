#ifndef LEAFID_IMAGE_HPP
#define LEAFID_IMAGE_HPP

#include <cassert>
#include <cstdint>
#include <vector>

namespace leafid {

// Coordinate convention throughout: x = column, y = row, origin top-left.

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

class RgbImage {
public:
    RgbImage() = default;
    RgbImage(int width, int height, Rgb fill = {})
        : width_(width), height_(height),
          pixels_(static_cast<std::size_t>(width) * height, fill) {
        assert(width >= 1 && height >= 1);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    Rgb& at(int x, int y) { return pixels_[index(x, y)]; }
    const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }

    const std::vector<Rgb>& pixels() const { return pixels_; }

private:
    std::size_t index(int x, int y) const {
        assert(x >= 0 && x < width_ && y >= 0 && y < height_);
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0, height_ = 0;
    std::vector<Rgb> pixels_;
};

class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, std::uint8_t fill = 0)
        : width_(width), height_(height),
          intensity_(static_cast<std::size_t>(width) * height, fill) {
        assert(width >= 1 && height >= 1);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    std::uint8_t& at(int x, int y) { return intensity_[index(x, y)]; }
    std::uint8_t at(int x, int y) const { return intensity_[index(x, y)]; }

    const std::vector<std::uint8_t>& data() const { return intensity_; }

private:
    std::size_t index(int x, int y) const {
        assert(x >= 0 && x < width_ && y >= 0 && y < height_);
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0, height_ = 0;
    std::vector<std::uint8_t> intensity_;
};

/// Binary leaf membership. segment_leaf() guarantees a nonempty,
/// single-4-connected-component, hole-free mask; hand-built masks used in
/// tests can be checked with validate_mask().
class LeafMask {
public:
    LeafMask() = default;
    LeafMask(int width, int height, bool fill = false)
        : width_(width), height_(height),
          member_(static_cast<std::size_t>(width) * height, fill ? 1 : 0) {
        assert(width >= 1 && height >= 1);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    bool at(int x, int y) const { return member_[index(x, y)] != 0; }
    void set(int x, int y, bool v) { member_[index(x, y)] = v ? 1 : 0; }

    bool contains(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_ && at(x, y);
    }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto v : member_) n += v;
        return n;
    }

private:
    std::size_t index(int x, int y) const {
        assert(x >= 0 && x < width_ && y >= 0 && y < height_);
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0, height_ = 0;
    std::vector<std::uint8_t> member_;
};

struct Point {
    int x = 0, y = 0;
    bool operator==(const Point&) const = default;
};

/// Ordered boundary trace; consecutive points 8-adjacent, closed.
using Contour = std::vector<Point>;

struct Centroid {
    double x = 0.0, y = 0.0;
};

}  // namespace leafid

#endif
