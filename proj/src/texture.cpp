#include "leafid/texture.hpp"

#include <cmath>

#include "leafid/errors.hpp"

namespace leafid {

QuantizedImage quantize(const GrayImage& gray, const LeafMask& mask, int levels) {
    if (levels < 2) throw InvalidArgument("quantization needs at least 2 levels");
    if (gray.width() != mask.width() || gray.height() != mask.height())
        throw InvalidArgument("gray image and mask dimensions differ");

    QuantizedImage q;
    q.width = gray.width();
    q.height = gray.height();
    q.levels = levels;
    q.level.resize(static_cast<std::size_t>(q.width) * q.height, -1);
    for (int y = 0; y < q.height; ++y)
        for (int x = 0; x < q.width; ++x)
            if (mask.at(x, y)) {
                const int lvl = gray.at(x, y) * levels / 256;
                q.level[static_cast<std::size_t>(y) * q.width + x] =
                    static_cast<std::int16_t>(std::min(lvl, levels - 1));
            }
    return q;
}

Glcm build_glcm(const QuantizedImage& q, Offset direction, int distance) {
    if (distance < 1) throw InvalidArgument("GLCM distance must be >= 1");
    if (direction.dx == 0 && direction.dy == 0)
        throw InvalidArgument("GLCM direction offset must be nonzero");

    Glcm g;
    g.levels = q.levels;
    g.state = GlcmState::Raw;
    g.direction = direction;
    g.distance = distance;
    g.entries.assign(static_cast<std::size_t>(q.levels) * q.levels, 0.0);

    const int sx = direction.dx * distance;
    const int sy = direction.dy * distance;
    double total = 0.0;
    for (int y = 0; y < q.height; ++y)
        for (int x = 0; x < q.width; ++x) {
            const std::int16_t a = q.at(x, y);
            if (a < 0) continue;
            const int nx = x + sx;
            const int ny = y + sy;
            if (nx < 0 || nx >= q.width || ny < 0 || ny >= q.height) continue;
            const std::int16_t b = q.at(nx, ny);
            if (b < 0) continue;
            g.at(a, b) += 1.0;
            total += 1.0;
        }
    if (total == 0.0) throw EmptyGlcm("no co-occurring leaf pixel pair for this offset");
    return g;
}

Glcm symmetrize(const Glcm& raw) {
    if (raw.state != GlcmState::Raw)
        throw InvalidArgument("symmetrize expects a raw GLCM");
    Glcm out = raw;
    for (int i = 0; i < raw.levels; ++i)
        for (int j = 0; j < raw.levels; ++j)
            out.at(i, j) = raw.at(i, j) + raw.at(j, i);
    out.state = GlcmState::Symmetric;
    return out;
}

Glcm normalize(const Glcm& symmetric) {
    if (symmetric.state != GlcmState::Symmetric)
        throw InvalidArgument("normalize expects a symmetric GLCM");
    Glcm out = symmetric;
    double total = 0.0;
    for (double e : out.entries) total += e;
    if (total == 0.0) throw EmptyGlcm("GLCM sums to 0");
    for (double& e : out.entries) e /= total;
    out.state = GlcmState::Normalized;
    return out;
}

Glcm symmetrize_normalize(const Glcm& raw) {
    return normalize(symmetrize(raw));
}

TextureFeatures haralick_features(const Glcm& g, const HaralickOptions& opts) {
    if (g.state != GlcmState::Normalized)
        throw InvalidArgument("haralick_features expects a normalized GLCM");

    const int levels = g.levels;
    TextureFeatures f;

    double mu_i = 0.0, mu_j = 0.0;
    for (int i = 0; i < levels; ++i)
        for (int j = 0; j < levels; ++j) {
            const double p = g.at(i, j);
            mu_i += i * p;
            mu_j += j * p;
        }

    double var_i = 0.0, var_j = 0.0;
    for (int i = 0; i < levels; ++i)
        for (int j = 0; j < levels; ++j) {
            const double p = g.at(i, j);
            const double diff = static_cast<double>(i - j);
            f.angular_second_moment += p * p;
            f.contrast += diff * diff * p;
            if (opts.standard_idm)
                f.inverse_difference_moment += p / (1.0 + diff * diff);
            else
                f.inverse_difference_moment += p * p / (1.0 + diff * diff);
            if (p > 0.0) f.entropy -= p * std::log(p);
            var_i += p * (i - mu_i) * (i - mu_i);
            var_j += p * (j - mu_j) * (j - mu_j);
        }

    const double sigma_prod = std::sqrt(var_i) * std::sqrt(var_j);
    if (sigma_prod >= 1e-12) {
        double num = 0.0;
        for (int i = 0; i < levels; ++i)
            for (int j = 0; j < levels; ++j) {
                if (opts.standard_correlation)
                    num += static_cast<double>(i) * j * g.at(i, j);
                else
                    num += static_cast<double>(i) * j * (g.at(i, j) - mu_i * mu_j);
            }
        if (opts.standard_correlation) num -= mu_i * mu_j;
        f.correlation = num / sigma_prod;
    }
    return f;
}

TextureFeatures averaged_texture_features(const GrayImage& gray, const LeafMask& mask,
                                          int levels, int distance,
                                          const HaralickOptions& opts) {
    const QuantizedImage q = quantize(gray, mask, levels);
    TextureFeatures sum;
    int valid = 0;
    for (const Offset& dir : glcm_directions()) {
        Glcm raw;
        try {
            raw = build_glcm(q, dir, distance);
        } catch (const EmptyGlcm&) {
            continue;
        }
        const TextureFeatures f = haralick_features(symmetrize_normalize(raw), opts);
        sum.angular_second_moment += f.angular_second_moment;
        sum.contrast += f.contrast;
        sum.inverse_difference_moment += f.inverse_difference_moment;
        sum.entropy += f.entropy;
        sum.correlation += f.correlation;
        ++valid;
    }
    if (valid == 0) throw AllDirectionsEmpty("mask too thin for any GLCM offset");
    sum.angular_second_moment /= valid;
    sum.contrast /= valid;
    sum.inverse_difference_moment /= valid;
    sum.entropy /= valid;
    sum.correlation /= valid;
    return sum;
}

}  // namespace leafid
