#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "leafid/errors.hpp"
#include "leafid/imaging.hpp"
#include "leafid/io.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace leafid;

namespace {

GrayImage constant_image(int w, int h, std::uint8_t v) { return GrayImage(w, h, v); }

LeafMask disk_mask(int radius, int size) {
    LeafMask m(size, size);
    const double c = size / 2.0;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            if ((x - c) * (x - c) + (y - c) * (y - c) <= double(radius) * radius)
                m.set(x, y, true);
    return m;
}

std::set<std::pair<int, int>> contour_set(const Contour& c) {
    std::set<std::pair<int, int>> out;
    for (const auto& p : c) out.insert({p.x, p.y});
    return out;
}

// pixels with a background 4-neighbor; the Moore walk must cover these
std::set<std::pair<int, int>> four_exposed_set(const LeafMask& mask) {
    std::set<std::pair<int, int>> out;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            if (!mask.contains(x - 1, y) || !mask.contains(x + 1, y) ||
                !mask.contains(x, y - 1) || !mask.contains(x, y + 1))
                out.insert({x, y});
        }
    return out;
}

bool subset_of(const std::set<std::pair<int, int>>& a, const std::set<std::pair<int, int>>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("grayscale conversion follows the luminance weights") {
    RgbImage img(3, 1);
    img.at(0, 0) = {255, 255, 255};
    img.at(1, 0) = {0, 0, 0};
    img.at(2, 0) = {100, 150, 200};
    const GrayImage gray = to_gray(img);
    CHECK(gray.at(0, 0) == 255);
    CHECK(gray.at(1, 0) == 0);
    CHECK(gray.at(2, 0) == 141);  // round(0.299*100 + 0.587*150 + 0.114*200)
}

TEST_CASE("image file round trip and load errors") {
    const auto dir = std::filesystem::path("imaging_test_io");
    std::filesystem::create_directories(dir);

    RgbImage img(5, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 5; ++x)
            img.at(x, y) = Rgb{std::uint8_t(x * 20), std::uint8_t(y * 30), std::uint8_t(x + y)};
    const std::string path = (dir / "tiny.png").string();
    write_rgb_png(img, path);

    const LoadedImage loaded = load_leaf_image(path);
    REQUIRE(loaded.rgb.width() == 5);
    REQUIRE(loaded.rgb.height() == 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 5; ++x) CHECK(loaded.rgb.at(x, y) == img.at(x, y));
    CHECK(loaded.gray.at(2, 1) == to_gray(img).at(2, 1));

    CHECK_THROWS_AS(load_leaf_image((dir / "missing.png").string()), FileNotFound);

    const std::string junk = (dir / "junk.png").string();
    std::ofstream(junk) << "this is not a png";
    CHECK_THROWS_AS(load_leaf_image(junk), DecodeError);
}

TEST_CASE("segment_leaf rejects constant images") {
    CHECK_THROWS_AS(segment_leaf(constant_image(16, 16, 128)), NoForeground);
}

TEST_CASE("segment_leaf isolates a dark square on a light background") {
    GrayImage img(50, 50, 220);
    for (int y = 15; y < 35; ++y)
        for (int x = 15; x < 35; ++x) img.at(x, y) = 40;

    // Otsu must land between the two modes.
    std::array<std::uint64_t, 256> hist{};
    for (auto v : img.data()) ++hist[v];
    const int t = otsu_threshold(hist);
    CHECK(t >= 40);
    CHECK(t < 220);

    const LeafMask mask = segment_leaf(img);
    CHECK(mask.count() == 400);
    for (int y = 0; y < 50; ++y)
        for (int x = 0; x < 50; ++x)
            CHECK(mask.at(x, y) == (x >= 15 && x < 35 && y >= 15 && y < 35));
    CHECK(validate_mask(mask));
    CHECK(oracle::valid_mask(mask));
}

TEST_CASE("segment_leaf keeps only the largest component and fills holes") {
    GrayImage img(60, 40, 220);
    // blob A: 20x15 = 300 px, with a 3x3 bright hole punched in
    for (int y = 5; y < 20; ++y)
        for (int x = 5; x < 25; ++x) img.at(x, y) = 30;
    for (int y = 10; y < 13; ++y)
        for (int x = 10; x < 13; ++x) img.at(x, y) = 220;
    // blob B: 50 px
    for (int y = 28; y < 33; ++y)
        for (int x = 40; x < 50; ++x) img.at(x, y) = 30;

    const LeafMask mask = segment_leaf(img);
    CHECK(mask.count() == 300);  // hole refilled, small blob dropped
    CHECK(mask.at(11, 11));      // hole interior now leaf
    CHECK_FALSE(mask.at(45, 30));
    CHECK(validate_mask(mask));
    CHECK(oracle::valid_mask(mask));
}

TEST_CASE("segment_leaf foreground policy override") {
    GrayImage img(30, 30, 40);  // dark background
    for (int y = 10; y < 20; ++y)
        for (int x = 10; x < 20; ++x) img.at(x, y) = 210;  // bright leaf

    const LeafMask auto_mask = segment_leaf(img);  // border pixels are dark
    CHECK(auto_mask.count() == 100);
    CHECK(auto_mask.at(15, 15));

    // forcing the dark side makes the bright square an enclosed hole,
    // which hole filling then recovers
    const LeafMask dark_mask = segment_leaf(img, ForegroundPolicy::Dark);
    CHECK(dark_mask.count() == 30 * 30);
}

TEST_CASE("segment_leaf is idempotent on its own two-level rendering") {
    const LeafMask mask = segment_leaf([] {
        GrayImage img(48, 40, 210);
        for (int y = 8; y < 30; ++y)
            for (int x = 10; x < 38; ++x)
                if ((x - 24) * (x - 24) + (y - 19) * (y - 19) < 160) img.at(x, y) = 60;
        return img;
    }());

    GrayImage rendered(mask.width(), mask.height(), 255);
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) rendered.at(x, y) = 0;
    const LeafMask again = segment_leaf(rendered);
    REQUIRE(again.count() == mask.count());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) CHECK(again.at(x, y) == mask.at(x, y));
}

TEST_CASE("trace_contour degenerate and tiny masks") {
    LeafMask single(7, 7);
    single.set(3, 4, true);
    const Contour c1 = trace_contour(single);
    REQUIRE(c1.size() == 1);
    CHECK(c1[0] == Point{3, 4});
    CHECK(contour_perimeter(c1) == doctest::Approx(1.0));

    LeafMask square(5, 5);
    for (int y = 1; y <= 3; ++y)
        for (int x = 1; x <= 3; ++x) square.set(x, y, true);
    const Contour c2 = trace_contour(square);
    CHECK(c2.size() == 8);  // all but the center pixel
    CHECK(c2.front() == Point{1, 1});
    CHECK(contour_set(c2) == oracle::boundary_set(square));  // no inner corners here
}

TEST_CASE("trace_contour on a disk approximates the circle boundary") {
    const LeafMask mask = disk_mask(10, 31);
    const Contour contour = trace_contour(mask);
    const auto points = contour_set(contour);
    CHECK(subset_of(points, oracle::boundary_set(mask)));
    CHECK(subset_of(four_exposed_set(mask), points));
    const double circumference = 2 * std::numbers::pi * 10;
    CHECK(std::abs(double(contour.size()) - circumference) <= 0.15 * circumference);
}

TEST_CASE("trace_contour walks the boundary of random blobs") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const LeafMask mask = synth::blob_mask(13.0, seed);
        REQUIRE(validate_mask(mask));
        const Contour contour = trace_contour(mask);
        const auto points = contour_set(contour);
        // the walk stays on the 8-boundary and covers every 4-exposed pixel
        CHECK(subset_of(points, oracle::boundary_set(mask)));
        CHECK(subset_of(four_exposed_set(mask), points));
        // consecutive points 8-adjacent, closed
        for (std::size_t i = 0; i < contour.size(); ++i) {
            const Point& a = contour[i];
            const Point& b = contour[(i + 1) % contour.size()];
            CHECK(std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)) == 1);
        }
    }
}

TEST_CASE("centroid basics and brute-force agreement") {
    LeafMask single(8, 8);
    single.set(3, 5, true);
    const Centroid c1 = mask_centroid(single);
    CHECK(c1.x == doctest::Approx(3.0));
    CHECK(c1.y == doctest::Approx(5.0));

    LeafMask block(4, 4);
    for (int y = 0; y <= 1; ++y)
        for (int x = 0; x <= 1; ++x) block.set(x, y, true);
    const Centroid c2 = mask_centroid(block);
    CHECK(c2.x == doctest::Approx(0.5));
    CHECK(c2.y == doctest::Approx(0.5));

    // L-pentomino
    LeafMask ell(6, 6);
    const int px[] = {2, 2, 2, 2, 3};
    const int py[] = {1, 2, 3, 4, 4};
    double sx = 0, sy = 0;
    for (int i = 0; i < 5; ++i) {
        ell.set(px[i], py[i], true);
        sx += px[i];
        sy += py[i];
    }
    const Centroid c3 = mask_centroid(ell);
    CHECK(c3.x == doctest::Approx(sx / 5).epsilon(1e-12));
    CHECK(c3.y == doctest::Approx(sy / 5).epsilon(1e-12));
}

TEST_CASE("max_radius on reference shapes") {
    const LeafMask disk = disk_mask(10, 31);
    const Contour dc = trace_contour(disk);
    CHECK(std::abs(max_radius(dc, mask_centroid(disk)) - 10.0) <= 1.0);

    LeafMask square(17, 17);
    for (int y = 3; y <= 13; ++y)
        for (int x = 3; x <= 13; ++x) square.set(x, y, true);  // (2w+1)^2, w = 5
    const Contour sc = trace_contour(square);
    CHECK(std::abs(max_radius(sc, mask_centroid(square)) - 5.0 * std::sqrt(2.0)) <= 1.0);

    const LeafMask blob = synth::blob_mask(12.0, 42);
    const Contour bc = trace_contour(blob);
    const Centroid c = mask_centroid(blob);
    double brute = 0.0;
    for (const auto& p : bc)
        brute = std::max(brute, std::hypot(p.x - c.x, p.y - c.y));
    CHECK(max_radius(bc, c) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("centroid and max_radius are translation equivariant") {
    const LeafMask mask = synth::blob_mask(11.0, 7);
    const Centroid c = mask_centroid(mask);
    const double r = max_radius(trace_contour(mask), c);

    const int dx = 9, dy = 4;
    const LeafMask moved =
        synth::translate(mask, dx, dy, mask.width() + 15, mask.height() + 11);
    const Centroid mc = mask_centroid(moved);
    CHECK(std::abs(mc.x - (c.x + dx)) <= 1e-9);
    CHECK(std::abs(mc.y - (c.y + dy)) <= 1e-9);
    CHECK(std::abs(max_radius(trace_contour(moved), mc) - r) <= 1e-9);
}

TEST_CASE("validate_mask flags broken invariants") {
    LeafMask empty(4, 4);
    CHECK_FALSE(validate_mask(empty));

    LeafMask two(6, 6);
    two.set(1, 1, true);
    two.set(4, 4, true);  // two 4-components
    CHECK_FALSE(validate_mask(two));

    LeafMask ring(7, 7);
    for (int y = 1; y <= 5; ++y)
        for (int x = 1; x <= 5; ++x)
            if (x == 1 || x == 5 || y == 1 || y == 5) ring.set(x, y, true);
    CHECK_FALSE(validate_mask(ring));  // enclosed hole
}
