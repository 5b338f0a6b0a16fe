#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "leafid/color.hpp"
#include "leafid/errors.hpp"
#include "support/oracles.hpp"

using namespace leafid;

namespace {

// 1xN strip with a full mask; values go into the red channel.
struct Strip {
    RgbImage img;
    LeafMask mask;
};

Strip strip_of(const std::vector<std::uint8_t>& values) {
    Strip s{RgbImage(static_cast<int>(values.size()), 1), LeafMask(static_cast<int>(values.size()), 1)};
    for (std::size_t i = 0; i < values.size(); ++i) {
        s.img.at(static_cast<int>(i), 0) = Rgb{values[i], values[i], values[i]};
        s.mask.set(static_cast<int>(i), 0, true);
    }
    return s;
}

}  // namespace

TEST_CASE("constant channel degenerates to zero spread") {
    const Strip s = strip_of(std::vector<std::uint8_t>(12, 100));
    const ColorMoments m = color_moments(s.img, s.mask);
    CHECK(m.r.mean == doctest::Approx(100.0));
    CHECK(m.r.stddev == 0.0);
    CHECK(m.r.skewness == 0.0);
    CHECK(m.r.kurtosis == 0.0);
}

TEST_CASE("two-point distribution: half zeros, half twos") {
    std::vector<std::uint8_t> values(10, 0);
    std::fill(values.begin() + 5, values.end(), 2);
    const ColorMoments m = color_moments(strip_of(values).img, strip_of(values).mask);
    CHECK(m.r.mean == doctest::Approx(1.0));
    CHECK(m.r.stddev == doctest::Approx(1.0));
    CHECK(m.r.skewness == doctest::Approx(0.0));
    CHECK(m.r.kurtosis == doctest::Approx(-2.0));  // fourth-moment ratio 1, minus 3
}

TEST_CASE("2x2 block with values 1..4") {
    const Strip s = strip_of({1, 2, 3, 4});
    const ColorMoments m = color_moments(s.img, s.mask);
    CHECK(m.r.mean == doctest::Approx(2.5));
    CHECK(m.r.stddev == doctest::Approx(std::sqrt(1.25)));
    CHECK(m.g.mean == doctest::Approx(2.5));
    CHECK(m.b.stddev == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("moments ignore background pixels iff masked") {
    RgbImage img(4, 1);
    LeafMask mask(4, 1);
    for (int x = 0; x < 4; ++x) img.at(x, 0) = Rgb{std::uint8_t(50 + 50 * x), 0, 0};
    mask.set(1, 0, true);
    mask.set(2, 0, true);

    const ColorMoments masked = color_moments(img, mask);
    CHECK(masked.r.mean == doctest::Approx((100.0 + 150.0) / 2));

    const ColorMoments full = color_moments(img, mask, false);
    CHECK(full.r.mean == doctest::Approx((50.0 + 100 + 150 + 200) / 4));
}

TEST_CASE("oracle equivalence over random pixel sets") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> size_dist(2, 40);
    std::uniform_int_distribution<int> value_dist(0, 255);
    for (int it = 0; it < 120; ++it) {
        const int n = size_dist(rng);
        std::vector<std::uint8_t> values(n);
        std::vector<double> as_double(n);
        for (int i = 0; i < n; ++i) {
            values[i] = static_cast<std::uint8_t>(value_dist(rng));
            as_double[i] = values[i];
        }
        const Strip s = strip_of(values);
        const ColorMoments m = color_moments(s.img, s.mask);
        const oracle::Moments expected = oracle::color_moments(as_double);
        CHECK(m.r.mean == doctest::Approx(expected.mean).epsilon(1e-9));
        CHECK(m.r.stddev == doctest::Approx(expected.stddev).epsilon(1e-9));
        CHECK(m.r.skewness == doctest::Approx(expected.skewness).epsilon(1e-9));
        CHECK(m.r.kurtosis == doctest::Approx(expected.kurtosis).epsilon(1e-9));
    }
}

TEST_CASE("permutation invariance") {
    std::mt19937_64 rng(99);
    std::vector<std::uint8_t> values(30);
    for (auto& v : values) v = static_cast<std::uint8_t>(rng() % 256);
    const Strip a = strip_of(values);
    const ColorMoments ma = color_moments(a.img, a.mask);

    std::shuffle(values.begin(), values.end(), rng);
    const Strip b = strip_of(values);
    const ColorMoments mb = color_moments(b.img, b.mask);

    CHECK(ma.r.mean == doctest::Approx(mb.r.mean).epsilon(1e-12));
    CHECK(ma.r.stddev == doctest::Approx(mb.r.stddev).epsilon(1e-12));
    CHECK(ma.r.skewness == doctest::Approx(mb.r.skewness).epsilon(1e-12));
    CHECK(ma.r.kurtosis == doctest::Approx(mb.r.kurtosis).epsilon(1e-12));
}

TEST_CASE("shift and scale equivariance") {
    const std::vector<std::uint8_t> base = {10, 25, 40, 55, 70, 85, 100, 30, 60};
    const Strip s0 = strip_of(base);
    const ColorMoments m0 = color_moments(s0.img, s0.mask);

    std::vector<std::uint8_t> shifted(base);
    for (auto& v : shifted) v = static_cast<std::uint8_t>(v + 20);
    const Strip s1 = strip_of(shifted);
    const ColorMoments m1 = color_moments(s1.img, s1.mask);
    CHECK(m1.r.mean == doctest::Approx(m0.r.mean + 20).epsilon(1e-9));
    CHECK(m1.r.stddev == doctest::Approx(m0.r.stddev).epsilon(1e-9));
    CHECK(m1.r.skewness == doctest::Approx(m0.r.skewness).epsilon(1e-9));
    CHECK(m1.r.kurtosis == doctest::Approx(m0.r.kurtosis).epsilon(1e-9));

    std::vector<std::uint8_t> doubled(base);
    for (auto& v : doubled) v = static_cast<std::uint8_t>(v * 2);
    const Strip s2 = strip_of(doubled);
    const ColorMoments m2 = color_moments(s2.img, s2.mask);
    CHECK(m2.r.mean == doctest::Approx(2 * m0.r.mean).epsilon(1e-9));
    CHECK(m2.r.stddev == doctest::Approx(2 * m0.r.stddev).epsilon(1e-9));
    CHECK(m2.r.skewness == doctest::Approx(m0.r.skewness).epsilon(1e-9));
    CHECK(m2.r.kurtosis == doctest::Approx(m0.r.kurtosis).epsilon(1e-9));
}

TEST_CASE("symmetric two-point distributions have kurtosis exactly -2") {
    for (int d : {5, 17, 42}) {
        std::vector<std::uint8_t> values;
        for (int i = 0; i < 8; ++i) {
            values.push_back(static_cast<std::uint8_t>(100 - d));
            values.push_back(static_cast<std::uint8_t>(100 + d));
        }
        const Strip s = strip_of(values);
        CHECK(color_moments(s.img, s.mask).r.kurtosis == doctest::Approx(-2.0).epsilon(1e-12));
    }
}
