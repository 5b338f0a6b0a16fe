#ifndef LEAFID_COLOR_HPP
#define LEAFID_COLOR_HPP

#include "leafid/image.hpp"

namespace leafid {

struct ChannelMoments {
    double mean = 0.0;
    double stddev = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;  // excess form
};

struct ColorMoments {
    ChannelMoments r, g, b;
};

/// Population moments per RGB channel over mask-true pixels
/// (mask_background=false computes over the whole raster instead).
/// A constant channel yields skewness = kurtosis = 0 by convention.
ColorMoments color_moments(const RgbImage& rgb, const LeafMask& mask,
                           bool mask_background = true);

}  // namespace leafid

#endif
