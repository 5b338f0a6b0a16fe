#include "leafid/imaging.hpp"

#include <algorithm>
#include <cmath>

#include "leafid/errors.hpp"
#include "leafid/io.hpp"

namespace leafid {

GrayImage to_gray(const RgbImage& rgb) {
    GrayImage gray(rgb.width(), rgb.height());
    for (int y = 0; y < rgb.height(); ++y) {
        for (int x = 0; x < rgb.width(); ++x) {
            const Rgb p = rgb.at(x, y);
            const double lum = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
            gray.at(x, y) = static_cast<std::uint8_t>(std::lround(lum));
        }
    }
    return gray;
}

LoadedImage load_leaf_image(const std::string& path) {
    RgbImage rgb = read_rgb(path);
    return LoadedImage{rgb, to_gray(rgb)};
}

int otsu_threshold(const std::array<std::uint64_t, 256>& hist, int lo, int hi) {
    std::uint64_t total = 0;
    double total_sum = 0.0;
    int occupied = 0;
    for (int v = lo; v <= hi; ++v) {
        total += hist[v];
        total_sum += static_cast<double>(hist[v]) * v;
        if (hist[v] > 0) ++occupied;
    }
    if (occupied < 2) return -1;

    int best_t = -1;
    double best_var = -1.0;
    std::uint64_t count0 = 0;
    double sum0 = 0.0;
    // Class 0 = values <= t. Both classes must be nonempty; first maximum wins.
    for (int t = lo; t < hi; ++t) {
        count0 += hist[t];
        sum0 += static_cast<double>(hist[t]) * t;
        const std::uint64_t count1 = total - count0;
        if (count0 == 0 || count1 == 0) continue;
        const double mean0 = sum0 / count0;
        const double mean1 = (total_sum - sum0) / count1;
        const double between = static_cast<double>(count0) * count1 * (mean0 - mean1) * (mean0 - mean1);
        if (between > best_var) {
            best_var = between;
            best_t = t;
        }
    }
    return best_t;
}

namespace {

std::array<std::uint64_t, 256> intensity_histogram(const GrayImage& gray) {
    std::array<std::uint64_t, 256> hist{};
    for (auto v : gray.data()) ++hist[v];
    return hist;
}

// Labels 4-connected components of `fg`; returns the pixel set of the largest
// one (first encountered in row-major order on ties).
std::vector<std::uint8_t> largest_component(const std::vector<std::uint8_t>& fg, int w, int h) {
    std::vector<std::int32_t> label(fg.size(), -1);
    std::int32_t next_label = 0;
    std::vector<std::size_t> sizes;
    std::vector<std::size_t> stack;

    for (std::size_t start = 0; start < fg.size(); ++start) {
        if (!fg[start] || label[start] >= 0) continue;
        std::size_t size = 0;
        stack.push_back(start);
        label[start] = next_label;
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            ++size;
            const int x = static_cast<int>(i % w);
            const int y = static_cast<int>(i / w);
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
                const std::size_t j = static_cast<std::size_t>(ny[k]) * w + nx[k];
                if (fg[j] && label[j] < 0) {
                    label[j] = next_label;
                    stack.push_back(j);
                }
            }
        }
        sizes.push_back(size);
        ++next_label;
    }

    std::vector<std::uint8_t> out(fg.size(), 0);
    if (sizes.empty()) return out;
    const std::int32_t best =
        static_cast<std::int32_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    for (std::size_t i = 0; i < fg.size(); ++i) out[i] = (label[i] == best) ? 1 : 0;
    return out;
}

// Background flood fill from the border; unreached background becomes leaf.
void fill_holes(std::vector<std::uint8_t>& mask, int w, int h) {
    std::vector<std::uint8_t> reached(mask.size(), 0);
    std::vector<std::size_t> stack;
    auto push = [&](int x, int y) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (!mask[i] && !reached[i]) {
            reached[i] = 1;
            stack.push_back(i);
        }
    };
    for (int x = 0; x < w; ++x) {
        push(x, 0);
        push(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        push(0, y);
        push(w - 1, y);
    }
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        const int x = static_cast<int>(i % w);
        const int y = static_cast<int>(i / w);
        if (x > 0) push(x - 1, y);
        if (x < w - 1) push(x + 1, y);
        if (y > 0) push(x, y - 1);
        if (y < h - 1) push(x, y + 1);
    }
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (!mask[i] && !reached[i]) mask[i] = 1;
}

}  // namespace

LeafMask segment_leaf(const GrayImage& gray, ForegroundPolicy policy) {
    const int w = gray.width();
    const int h = gray.height();
    const auto hist = intensity_histogram(gray);
    const int t = otsu_threshold(hist);
    if (t < 0) throw NoForeground("image has fewer than 2 distinct intensities");

    bool dark_is_leaf;
    switch (policy) {
        case ForegroundPolicy::Dark:
            dark_is_leaf = true;
            break;
        case ForegroundPolicy::Light:
            dark_is_leaf = false;
            break;
        case ForegroundPolicy::Auto:
        default: {
            std::size_t border_dark = 0, border_light = 0;
            auto tally = [&](int x, int y) {
                (gray.at(x, y) <= t ? border_dark : border_light)++;
            };
            for (int x = 0; x < w; ++x) {
                tally(x, 0);
                if (h > 1) tally(x, h - 1);
            }
            for (int y = 1; y + 1 < h; ++y) {
                tally(0, y);
                if (w > 1) tally(w - 1, y);
            }
            // Fewer border pixels wins; tie goes to the darker class.
            dark_is_leaf = border_dark <= border_light;
            break;
        }
    }

    std::vector<std::uint8_t> fg(static_cast<std::size_t>(w) * h, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            fg[static_cast<std::size_t>(y) * w + x] = (gray.at(x, y) <= t) == dark_is_leaf ? 1 : 0;

    std::vector<std::uint8_t> component = largest_component(fg, w, h);
    if (std::find(component.begin(), component.end(), 1) == component.end())
        throw NoForeground("segmentation produced an empty foreground");
    fill_holes(component, w, h);

    LeafMask mask(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            mask.set(x, y, component[static_cast<std::size_t>(y) * w + x] != 0);
    return mask;
}

namespace {

// Moore neighborhood in clockwise order (image coordinates, y down).
constexpr std::array<Point, 8> kMoore = {{{0, -1},
                                          {1, -1},
                                          {1, 0},
                                          {1, 1},
                                          {0, 1},
                                          {-1, 1},
                                          {-1, 0},
                                          {-1, -1}}};

int moore_index(Point from, Point to) {
    const Point d{to.x - from.x, to.y - from.y};
    for (int i = 0; i < 8; ++i)
        if (kMoore[i] == d) return i;
    return -1;
}

struct TraceState {
    Point pixel;
    Point backtrack;  // background neighbor we entered from
    bool operator==(const TraceState&) const = default;
};

// One Moore step: scan clockwise around state.pixel starting just past the
// backtrack; the first leaf pixel becomes the next position, the neighbor
// examined before it the new backtrack. Pixels whose only background
// exposure is diagonal (inner corners) are skipped by this walk; see
// trace_contour's contract.
TraceState moore_step(const LeafMask& mask, const TraceState& state) {
    const int start = moore_index(state.pixel, state.backtrack);
    for (int k = 1; k <= 8; ++k) {
        const int j = (start + k) % 8;
        const Point q{state.pixel.x + kMoore[j].x, state.pixel.y + kMoore[j].y};
        if (mask.contains(q.x, q.y)) {
            const int prev = (start + k - 1) % 8;
            return TraceState{q, {state.pixel.x + kMoore[prev].x, state.pixel.y + kMoore[prev].y}};
        }
    }
    return state;  // isolated pixel; callers handle this before stepping
}

}  // namespace

Contour trace_contour(const LeafMask& mask) {
    Point start{-1, -1};
    for (int y = 0; y < mask.height() && start.x < 0; ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) {
                start = {x, y};
                break;
            }
    if (start.x < 0) throw NoForeground("mask has no leaf pixel");

    bool has_neighbor = false;
    for (const auto& d : kMoore)
        if (mask.contains(start.x + d.x, start.y + d.y)) has_neighbor = true;
    if (!has_neighbor) return {start};

    // The topmost-leftmost start has a background W neighbor.
    const TraceState initial{start, {start.x - 1, start.y}};
    const TraceState first = moore_step(mask, initial);

    Contour points{start};
    TraceState state = first;
    const std::size_t guard = 8 * mask.count() + 8;
    std::size_t steps = 0;
    // Closed when the walk is back at the start about to repeat its first move.
    while (!(state.pixel == start && moore_step(mask, state) == first)) {
        points.push_back(state.pixel);
        state = moore_step(mask, state);
        if (++steps > guard) break;
    }
    return points;
}

Centroid mask_centroid(const LeafMask& mask) {
    double sx = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) {
                sx += x;
                sy += y;
                ++n;
            }
    if (n == 0) throw NoForeground("mask has no leaf pixel");
    return Centroid{sx / n, sy / n};
}

double max_radius(const Contour& contour, const Centroid& c) {
    double best_sq = 0.0;
    for (const auto& p : contour) {
        const double dx = p.x - c.x;
        const double dy = p.y - c.y;
        best_sq = std::max(best_sq, dx * dx + dy * dy);
    }
    return std::sqrt(best_sq);
}

double contour_perimeter(const Contour& contour) {
    if (contour.empty()) return 0.0;
    if (contour.size() == 1) return 1.0;
    double len = 0.0;
    for (std::size_t i = 0; i < contour.size(); ++i) {
        const Point& a = contour[i];
        const Point& b = contour[(i + 1) % contour.size()];
        const double dx = a.x - b.x;
        const double dy = a.y - b.y;
        len += std::sqrt(dx * dx + dy * dy);
    }
    return len;
}

bool validate_mask(const LeafMask& mask) {
    const int w = mask.width();
    const int h = mask.height();
    if (w < 1 || h < 1) return false;

    std::vector<std::uint8_t> fg(static_cast<std::size_t>(w) * h, 0);
    std::size_t n = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (mask.at(x, y)) {
                fg[static_cast<std::size_t>(y) * w + x] = 1;
                ++n;
            }
    if (n == 0) return false;

    const auto component = largest_component(fg, w, h);
    std::size_t comp_size = 0;
    for (auto v : component) comp_size += v;
    if (comp_size != n) return false;  // more than one component

    auto filled = fg;
    fill_holes(filled, w, h);
    return filled == fg;
}

}  // namespace leafid
