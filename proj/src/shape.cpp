#include "leafid/shape.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "leafid/errors.hpp"
#include "leafid/imaging.hpp"

namespace leafid {

PftDescriptor polar_fourier_descriptors(const GrayImage& gray, const LeafMask& mask,
                                        const Centroid& c, double r_max,
                                        const PftOptions& opts) {
    if (r_max <= 0.0) throw DegenerateRadius("maximum radius must be > 0");
    if (gray.width() != mask.width() || gray.height() != mask.height())
        throw InvalidArgument("gray image and mask dimensions differ");

    const int nr = opts.max_radial + 1;
    const int na = opts.max_angular + 1;
    std::vector<double> fr(static_cast<std::size_t>(nr) * na, 0.0);
    std::vector<double> fi(static_cast<std::size_t>(nr) * na, 0.0);

    const double two_pi = 2.0 * std::numbers::pi;
    for (int y = 0; y < gray.height(); ++y) {
        for (int x = 0; x < gray.width(); ++x) {
            if (opts.mask_background && !mask.at(x, y)) continue;
            const double intensity = gray.at(x, y);
            if (intensity == 0.0) continue;
            const double dx = x - c.x;
            const double dy = y - c.y;
            const double radius = std::sqrt(dx * dx + dy * dy);
            if (radius > r_max) continue;
            const double theta = std::atan2(dy, dx);  // wrapping into [0,2pi) is a no-op here
            const double step = two_pi * radius / r_max;

            // cos/sin of rho*step + phi*theta via complex rotation, so the
            // inner loops cost a handful of multiplies per harmonic.
            const double cos_step = std::cos(step), sin_step = std::sin(step);
            const double cos_theta = std::cos(theta), sin_theta = std::sin(theta);
            double rc = 1.0, rs = 0.0;  // (cos, sin) of rho*step
            for (int rho = 0; rho < nr; ++rho) {
                double ac = rc, as = rs;  // (cos, sin) of rho*step + phi*theta
                double* fr_row = fr.data() + static_cast<std::size_t>(rho) * na;
                double* fi_row = fi.data() + static_cast<std::size_t>(rho) * na;
                for (int phi = 0; phi < na; ++phi) {
                    fr_row[phi] += intensity * ac;
                    fi_row[phi] -= intensity * as;
                    const double nc = ac * cos_theta - as * sin_theta;
                    as = ac * sin_theta + as * cos_theta;
                    ac = nc;
                }
                const double nrc = rc * cos_step - rs * sin_step;
                rs = rc * sin_step + rs * cos_step;
                rc = nrc;
            }
        }
    }

    const double dc = std::sqrt(fr[0] * fr[0] + fi[0] * fi[0]);
    if (dc == 0.0) throw DegenerateRadius("blank leaf region: DC magnitude is 0");

    PftDescriptor out;
    out.max_radial = opts.max_radial;
    out.max_angular = opts.max_angular;
    out.values.resize(static_cast<std::size_t>(nr) * na);
    out.values[0] = dc / (std::numbers::pi * r_max * r_max);
    for (std::size_t k = 1; k < out.values.size(); ++k)
        out.values[k] = std::sqrt(fr[k] * fr[k] + fi[k] * fi[k]) / dc;
    return out;
}

GeometricFeatures geometric_features(const LeafMask& mask, const Contour& contour,
                                     const Centroid& c) {
    if (contour.size() < 3) throw DegenerateShape("contour needs at least 3 points");

    // Second-order central moments, pixels treated as unit squares
    // (the 1/12 term keeps 1-pixel-thin shapes off exactly zero).
    double m20 = 0.0, m02 = 0.0, m11 = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) {
                const double dx = x - c.x;
                const double dy = y - c.y;
                m20 += dx * dx;
                m02 += dy * dy;
                m11 += dx * dy;
                ++n;
            }
    m20 = m20 / n + 1.0 / 12.0;
    m02 = m02 / n + 1.0 / 12.0;
    m11 /= n;

    const double tr = m20 + m02;
    const double det = std::sqrt((m20 - m02) * (m20 - m02) + 4.0 * m11 * m11);
    const double lambda_max = (tr + det) / 2.0;
    const double lambda_min = (tr - det) / 2.0;
    if (lambda_max <= 0.0) throw DegenerateShape("major axis length is 0");

    double min_d = std::numeric_limits<double>::infinity();
    double max_d = 0.0;
    for (const auto& p : contour) {
        const double dx = p.x - c.x;
        const double dy = p.y - c.y;
        const double d = std::sqrt(dx * dx + dy * dy);
        min_d = std::min(min_d, d);
        max_d = std::max(max_d, d);
    }
    if (min_d == 0.0) throw DegenerateShape("centroid lies on the contour");

    const double perimeter = contour_perimeter(contour);

    GeometricFeatures out;
    out.eccentricity = std::sqrt(std::max(lambda_min, 0.0) / lambda_max);
    out.roundness = static_cast<double>(n) / (perimeter * perimeter);
    out.dispersion = max_d / min_d;
    return out;
}

}  // namespace leafid
