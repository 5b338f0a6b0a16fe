#ifndef LEAFID_IMAGING_HPP
#define LEAFID_IMAGING_HPP

#include <array>
#include <cstdint>
#include <string>

#include "leafid/image.hpp"

namespace leafid {

/// Which Otsu class becomes the leaf. Auto picks the class touching fewer
/// border pixels, ties broken by darker mean.
enum class ForegroundPolicy { Auto, Dark, Light };

struct LoadedImage {
    RgbImage rgb;
    GrayImage gray;
};

/// Luminance conversion: round(0.299 R + 0.587 G + 0.114 B).
GrayImage to_gray(const RgbImage& rgb);

/// Decodes PNG/JPEG/BMP and derives the grayscale raster.
LoadedImage load_leaf_image(const std::string& path);

/// Otsu's threshold over hist[lo..hi]; returns t maximizing between-class
/// variance (class 0 = values <= t). Requires at least two occupied bins,
/// returns -1 otherwise.
int otsu_threshold(const std::array<std::uint64_t, 256>& hist, int lo = 0, int hi = 255);

/// Otsu segmentation -> largest 4-connected component -> hole fill.
LeafMask segment_leaf(const GrayImage& gray,
                      ForegroundPolicy policy = ForegroundPolicy::Auto);

/// Moore-neighborhood boundary trace, clockwise in image coordinates,
/// starting at the topmost-then-leftmost leaf pixel. Visits every pixel
/// with a background 4-neighbor; pixels exposed only diagonally (inner
/// corners of staircases) are not part of the walk.
Contour trace_contour(const LeafMask& mask);

Centroid mask_centroid(const LeafMask& mask);

/// Largest centroid-to-contour-point distance.
double max_radius(const Contour& contour, const Centroid& c);

/// Closed polygonal length of the trace: unit steps count 1, diagonals
/// sqrt(2). A single-point contour has perimeter 1 (its pixel).
double contour_perimeter(const Contour& contour);

/// Invariant check used by tests: nonempty, one 4-connected component,
/// every background region touches the border.
bool validate_mask(const LeafMask& mask);

}  // namespace leafid

#endif
