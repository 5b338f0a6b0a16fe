#include "leafid/color.hpp"

#include <cmath>
#include <vector>

#include "leafid/errors.hpp"

namespace leafid {

namespace {

ChannelMoments channel_moments(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    const double sigma = std::sqrt(m2 / n);

    ChannelMoments out;
    out.mean = mean;
    out.stddev = sigma;
    if (sigma > 0.0) {
        out.skewness = m3 / (n * sigma * sigma * sigma);
        out.kurtosis = m4 / (n * sigma * sigma * sigma * sigma) - 3.0;
    }
    return out;
}

}  // namespace

ColorMoments color_moments(const RgbImage& rgb, const LeafMask& mask, bool mask_background) {
    if (mask_background && (rgb.width() != mask.width() || rgb.height() != mask.height()))
        throw InvalidArgument("image and mask dimensions differ");

    std::vector<double> r, g, b;
    for (int y = 0; y < rgb.height(); ++y)
        for (int x = 0; x < rgb.width(); ++x) {
            if (mask_background && !mask.at(x, y)) continue;
            const Rgb p = rgb.at(x, y);
            r.push_back(p.r);
            g.push_back(p.g);
            b.push_back(p.b);
        }
    if (r.empty()) throw NoForeground("mask has no leaf pixel");

    return ColorMoments{channel_moments(r), channel_moments(g), channel_moments(b)};
}

}  // namespace leafid
