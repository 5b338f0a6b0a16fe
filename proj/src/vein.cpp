#include "leafid/vein.hpp"

#include <algorithm>
#include <vector>

#include "leafid/errors.hpp"
#include "leafid/imaging.hpp"

namespace leafid {

namespace {

std::vector<Point> disk_offsets(int radius) {
    std::vector<Point> out;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) out.push_back({dx, dy});
    return out;
}

enum class Morph { Erode, Dilate };

GrayImage apply(const GrayImage& src, const std::vector<Point>& se, Morph op) {
    const int w = src.width();
    const int h = src.height();
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int extreme = (op == Morph::Erode) ? 255 : 0;
            for (const Point& d : se) {
                const int nx = x + d.x;
                const int ny = y + d.y;
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                const int v = src.at(nx, ny);
                extreme = (op == Morph::Erode) ? std::min(extreme, v) : std::max(extreme, v);
            }
            out.at(x, y) = static_cast<std::uint8_t>(extreme);
        }
    return out;
}

}  // namespace

GrayImage gray_opening(const GrayImage& gray, int radius) {
    if (radius < 1 || radius > 4) throw InvalidArgument("opening radius must be in 1..4");
    const auto se = disk_offsets(radius);
    return apply(apply(gray, se, Morph::Erode), se, Morph::Dilate);
}

VeinFeatures vein_features(const GrayImage& gray, const LeafMask& mask,
                           const VeinOptions& opts) {
    if (gray.width() != mask.width() || gray.height() != mask.height())
        throw InvalidArgument("gray image and mask dimensions differ");

    GrayImage work = gray;
    if (opts.dark_veins)
        for (int y = 0; y < work.height(); ++y)
            for (int x = 0; x < work.width(); ++x)
                work.at(x, y) = static_cast<std::uint8_t>(255 - work.at(x, y));

    std::size_t area = 0;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) ++area;
    if (area == 0) throw NoForeground("mask has no leaf pixel");

    VeinFeatures out;
    for (int radius = 1; radius <= 4; ++radius) {
        const GrayImage opened = gray_opening(work, radius);

        std::array<std::uint64_t, 256> hist{};
        std::vector<int> tophat(static_cast<std::size_t>(mask.width()) * mask.height(), 0);
        bool any_nonzero = false;
        for (int y = 0; y < mask.height(); ++y)
            for (int x = 0; x < mask.width(); ++x) {
                if (!mask.at(x, y)) continue;
                const int d = std::max(work.at(x, y) - opened.at(x, y), 0);
                tophat[static_cast<std::size_t>(y) * mask.width() + x] = d;
                if (d > 0) {
                    ++hist[d];
                    any_nonzero = true;
                }
            }
        if (!any_nonzero) continue;  // v stays 0 for this radius

        int threshold = opts.fixed_threshold;
        if (threshold < 0) {
            // Otsu over the nonzero top-hat values; a single distinct value
            // degenerates to threshold 0 (all nonzero pixels count).
            threshold = otsu_threshold(hist, 1, 255);
            if (threshold < 0) threshold = 0;
        }

        std::size_t count = 0;
        for (int y = 0; y < mask.height(); ++y)
            for (int x = 0; x < mask.width(); ++x)
                if (mask.at(x, y) &&
                    tophat[static_cast<std::size_t>(y) * mask.width() + x] > threshold)
                    ++count;
        out.v[radius - 1] = static_cast<double>(count) / static_cast<double>(area);
    }
    return out;
}

}  // namespace leafid
