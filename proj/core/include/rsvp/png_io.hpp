#pragma once

#include <string>
#include <vector>

#include "rsvp/image.hpp"

namespace rsvp {

// Encodes with fixed settings (compression level 6, no row filtering, no
// ancillary chunks) so the same pixels always produce the same bytes.
std::vector<uint8_t> encode_png(const Image& img);
void write_png(const std::string& path, const Image& img);

// Accepts any PNG color type; everything is expanded to 8-bit RGB.
Image decode_png(const std::vector<uint8_t>& bytes);
Image read_png(const std::string& path);

}  // namespace rsvp
