#pragma once

#include <filesystem>
#include <string>

#include "markcut/raster.h"

namespace markcut::io {

// Binary netpbm codecs. 16-bit PGM samples are big-endian per the format.
ColorImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const ColorImage& image);
std::string encode_ppm(const ColorImage& image);

DepthImage read_pgm16(const std::filesystem::path& path);
void write_pgm16(const std::filesystem::path& path, const DepthImage& image);
std::string encode_pgm16(const DepthImage& image);

Mask read_pgm8(const std::filesystem::path& path);
void write_pgm8(const std::filesystem::path& path, const Mask& image);

ColorImage decode_ppm(const std::string& bytes);
DepthImage decode_pgm16(const std::string& bytes);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace markcut::io
