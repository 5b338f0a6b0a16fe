#ifndef LEAFID_IO_HPP
#define LEAFID_IO_HPP

#include <string>

#include "leafid/image.hpp"

namespace leafid {

RgbImage read_rgb(const std::string& path);
void write_rgb_png(const RgbImage& image, const std::string& path);
void write_gray_png(const GrayImage& image, const std::string& path);

/// Writes the mask as a true 1-bit grayscale PNG (leaf = white).
void write_mask_png(const LeafMask& mask, const std::string& path);

}  // namespace leafid

#endif
