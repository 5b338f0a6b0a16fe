#include "leafid/io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <zlib.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "leafid/errors.hpp"

namespace leafid {

RgbImage read_rgb(const std::string& path) {
    if (!std::filesystem::exists(path)) throw FileNotFound(path);
    cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
    if (bgr.empty()) throw DecodeError(path);
    RgbImage out(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x)
            out.at(x, y) = Rgb{row[x][2], row[x][1], row[x][0]};
    }
    return out;
}

void write_rgb_png(const RgbImage& image, const std::string& path) {
    cv::Mat bgr(image.height(), image.width(), CV_8UC3);
    for (int y = 0; y < image.height(); ++y) {
        cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < image.width(); ++x) {
            const Rgb p = image.at(x, y);
            row[x] = cv::Vec3b(p.b, p.g, p.r);
        }
    }
    if (!cv::imwrite(path, bgr)) throw IoError("cannot write image: " + path);
}

void write_gray_png(const GrayImage& image, const std::string& path) {
    cv::Mat m(image.height(), image.width(), CV_8UC1);
    for (int y = 0; y < image.height(); ++y)
        std::memcpy(m.ptr(y), image.data().data() + static_cast<std::size_t>(y) * image.width(),
                    image.width());
    if (!cv::imwrite(path, m)) throw IoError("cannot write image: " + path);
}

namespace {

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::vector<std::uint8_t>& payload) {
    append_u32(out, static_cast<std::uint32_t>(payload.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const uLong crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    append_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

void write_mask_png(const LeafMask& mask, const std::string& path) {
    const int w = mask.width();
    const int h = mask.height();

    // Rows packed MSB-first at bit depth 1, each preceded by filter byte 0.
    const std::size_t row_bytes = (static_cast<std::size_t>(w) + 7) / 8;
    std::vector<std::uint8_t> raw((row_bytes + 1) * h, 0);
    for (int y = 0; y < h; ++y) {
        std::uint8_t* row = raw.data() + static_cast<std::size_t>(y) * (row_bytes + 1) + 1;
        for (int x = 0; x < w; ++x)
            if (mask.at(x, y)) row[x / 8] |= static_cast<std::uint8_t>(0x80 >> (x % 8));
    }

    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(bound);
    if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                  Z_BEST_COMPRESSION) != Z_OK)
        throw IoError("deflate failed while writing: " + path);
    compressed.resize(bound);

    std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    append_u32(ihdr, static_cast<std::uint32_t>(w));
    append_u32(ihdr, static_cast<std::uint32_t>(h));
    ihdr.push_back(1);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);  // deflate
    ihdr.push_back(0);  // adaptive filters
    ihdr.push_back(0);  // no interlace
    append_chunk(png, "IHDR", ihdr);
    append_chunk(png, "IDAT", compressed);
    append_chunk(png, "IEND", {});

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace leafid
