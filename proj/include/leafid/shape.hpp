#ifndef LEAFID_SHAPE_HPP
#define LEAFID_SHAPE_HPP

#include <vector>

#include "leafid/image.hpp"

namespace leafid {

struct PftOptions {
    int max_radial = 4;    // radial frequency bound m
    int max_angular = 6;   // angular frequency bound n
    bool mask_background = true;
};

/// Polar Fourier magnitudes, (max_radial+1)*(max_angular+1) values.
/// values[0] is the DC magnitude over pi*R_max^2; the rest are magnitudes
/// normalized by the DC magnitude, laid out radial-major.
struct PftDescriptor {
    int max_radial = 0;
    int max_angular = 0;
    std::vector<double> values;
};

PftDescriptor polar_fourier_descriptors(const GrayImage& gray, const LeafMask& mask,
                                        const Centroid& c, double r_max,
                                        const PftOptions& opts = {});

struct GeometricFeatures {
    double eccentricity = 0.0;  // minor/major axis ratio, in (0,1]
    double roundness = 0.0;     // area / perimeter^2
    double dispersion = 0.0;    // max/min centroid-to-contour distance, >= 1
};

GeometricFeatures geometric_features(const LeafMask& mask, const Contour& contour,
                                     const Centroid& c);

}  // namespace leafid

#endif
