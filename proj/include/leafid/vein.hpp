#ifndef LEAFID_VEIN_HPP
#define LEAFID_VEIN_HPP

#include <array>

#include "leafid/image.hpp"

namespace leafid {

/// Grayscale opening (erosion then dilation) with the flat disk
/// {(dx,dy): dx^2+dy^2 <= radius^2}; windows clamp at image edges.
GrayImage gray_opening(const GrayImage& gray, int radius);

struct VeinFeatures {
    std::array<double, 4> v{};  // vein-pixel fraction at disk radii 1..4
};

struct VeinOptions {
    int fixed_threshold = -1;  // < 0 selects Otsu on nonzero top-hat values
    bool dark_veins = false;   // black top-hat: open the inverted image
};

/// Top-hat (gray minus opening) per radius, thresholded inside the mask;
/// v[k] = thresholded pixel count / leaf area.
VeinFeatures vein_features(const GrayImage& gray, const LeafMask& mask,
                           const VeinOptions& opts = {});

}  // namespace leafid

#endif
