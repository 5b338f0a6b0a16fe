#ifndef LEAFID_TEXTURE_HPP
#define LEAFID_TEXTURE_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "leafid/image.hpp"

namespace leafid {

/// Gray levels reduced to 0..levels-1; background pixels hold -1 and never
/// enter pair counts.
struct QuantizedImage {
    int width = 0, height = 0;
    int levels = 0;
    std::vector<std::int16_t> level;

    std::int16_t at(int x, int y) const {
        return level[static_cast<std::size_t>(y) * width + x];
    }
};

QuantizedImage quantize(const GrayImage& gray, const LeafMask& mask, int levels = 8);

struct Offset {
    int dx = 0, dy = 0;
    bool operator==(const Offset&) const = default;
};

/// The eight compass directions at 45-degree steps, starting east, in image
/// coordinates (y down).
constexpr std::array<Offset, 8> glcm_directions() {
    return {{{1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}}};
}

enum class GlcmState { Raw, Symmetric, Normalized };

struct Glcm {
    int levels = 0;
    GlcmState state = GlcmState::Raw;
    Offset direction;
    int distance = 1;
    std::vector<double> entries;  // levels x levels, row-major

    double at(int i, int j) const {
        return entries[static_cast<std::size_t>(i) * levels + j];
    }
    double& at(int i, int j) {
        return entries[static_cast<std::size_t>(i) * levels + j];
    }
};

/// Counts ordered level pairs (p, p + d*direction) with both pixels on the leaf.
Glcm build_glcm(const QuantizedImage& q, Offset direction, int distance = 1);

/// G + G^T, entries still integral counts.
Glcm symmetrize(const Glcm& raw);

/// Divides a symmetric GLCM by its total so entries sum to 1.
Glcm normalize(const Glcm& symmetric);

/// (G + G^T) / sum(G + G^T).
Glcm symmetrize_normalize(const Glcm& raw);

struct TextureFeatures {
    double angular_second_moment = 0.0;
    double contrast = 0.0;
    double inverse_difference_moment = 0.0;
    double entropy = 0.0;
    double correlation = 0.0;
};

struct HaralickOptions {
    // Both default to the printed formulas; the standard Haralick forms are
    // selectable for comparison runs.
    bool standard_idm = false;
    bool standard_correlation = false;
};

TextureFeatures haralick_features(const Glcm& normalized, const HaralickOptions& opts = {});

/// Mean of the five features over the eight directions; directions whose
/// GLCM is empty are skipped.
TextureFeatures averaged_texture_features(const GrayImage& gray, const LeafMask& mask,
                                          int levels = 8, int distance = 1,
                                          const HaralickOptions& opts = {});

}  // namespace leafid

#endif
