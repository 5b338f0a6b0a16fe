#ifndef LEAFID_TESTS_SYNTHETIC_HPP
#define LEAFID_TESTS_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "leafid/image.hpp"

namespace leafid::synth {

// ---- raster helpers shared across tests ----

LeafMask translate(const LeafMask& mask, int dx, int dy, int new_w, int new_h);
GrayImage translate(const GrayImage& img, int dx, int dy, int new_w, int new_h,
                    std::uint8_t fill = 0);

/// Clockwise quarter turn; output width = input height.
LeafMask rotate90(const LeafMask& mask);
GrayImage rotate90(const GrayImage& img);

GrayImage upscale2x(const GrayImage& img);
LeafMask upscale2x(const LeafMask& mask);

/// Star-shaped blob r(theta) = base * (1 + a3 sin(3t+p1) + a5 sin(5t+p2)),
/// centered in a (2*margin + 2*base*1.4) square raster. Smooth enough that the
/// boundary has no 1-pixel necks.
LeafMask blob_mask(double base_radius, std::uint64_t seed, int margin = 6, double a3 = 0.25,
                   double a5 = 0.15);

/// Smooth intensity pattern over the blob, background 0.
GrayImage blob_image(const LeafMask& mask, std::uint64_t seed);

/// Intensity built from every polar harmonic up to (radial 4, angular 6),
/// each with a seeded phase, so no descriptor component is vanishingly
/// small. Background 0.
GrayImage harmonic_blob_image(const LeafMask& mask, std::uint64_t seed);

// ---- synthetic leaf photographs ----

enum class LeafShape { Ellipse, Rectangle, Rhombus };

struct LeafStyle {
    LeafShape shape = LeafShape::Ellipse;
    Rgb base_color{70, 135, 60};
    double stripe_freq = 0.0;   // cycles per pixel in leaf coordinates
    double stripe_amp = 0.0;
    bool veins = true;
};

/// One synthetic leaf photograph on a plain light background, with seeded
/// pose/color jitter and pixel noise.
RgbImage render_leaf(const LeafStyle& style, std::uint64_t seed, int size = 160);

struct ClassSpec {
    std::string label;
    LeafStyle style;
};

/// Renders images_per_class leaves per class under root/<label>/NNN.png.
/// Existing complete datasets are left untouched.
void write_dataset(const std::string& root, const std::vector<ClassSpec>& classes,
                   int images_per_class);

/// 12 classes: 3 shapes x 2 colors x 2 stripe frequencies.
std::vector<ClassSpec> dataset_shapes_colors_stripes();

/// 4 classes differing only in (near-isoluminant) color.
std::vector<ClassSpec> dataset_color_only();

/// 3 classes differing only in stripe frequency.
std::vector<ClassSpec> dataset_stripe_only();

}  // namespace leafid::synth

#endif
