#include "markcut/image_io.h"

#include <cctype>
#include <fstream>
#include <sstream>

namespace markcut::io {
namespace {

struct Header {
  std::string magic;
  int width = 0, height = 0, maxval = 0;
  std::size_t data_offset = 0;
};

Header parse_header(const std::string& bytes) {
  Header h;
  std::size_t pos = 0;
  auto next_token = [&]() {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])))
      tok += bytes[pos++];
    return tok;
  };
  try {
    h.magic = next_token();
    h.width = std::stoi(next_token());
    h.height = std::stoi(next_token());
    h.maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw FormatError("malformed netpbm header");
  }
  if (pos >= bytes.size()) throw FormatError("truncated netpbm data");
  h.data_offset = pos + 1;  // single whitespace after maxval
  if (h.width <= 0 || h.height <= 0 || h.maxval <= 0 || h.maxval > 65535)
    throw FormatError("invalid netpbm dimensions");
  return h;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ColorImage decode_ppm(const std::string& bytes) {
  const Header h = parse_header(bytes);
  if (h.magic != "P6" || h.maxval != 255) throw FormatError("expected 8-bit P6 image");
  const std::size_t need = static_cast<std::size_t>(h.width) * h.height * 3;
  if (bytes.size() < h.data_offset + need) throw FormatError("truncated P6 data");
  ColorImage img(h.width, h.height);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + h.data_offset);
  for (std::size_t i = 0; i < img.size(); ++i)
    img[i] = Rgb{p[3 * i], p[3 * i + 1], p[3 * i + 2]};
  return img;
}

DepthImage decode_pgm16(const std::string& bytes) {
  const Header h = parse_header(bytes);
  if (h.magic != "P5") throw FormatError("expected P5 image");
  DepthImage img(h.width, h.height);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + h.data_offset);
  if (h.maxval > 255) {
    if (bytes.size() < h.data_offset + img.size() * 2) throw FormatError("truncated P5 data");
    for (std::size_t i = 0; i < img.size(); ++i)
      img[i] = static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]);
  } else {
    if (bytes.size() < h.data_offset + img.size()) throw FormatError("truncated P5 data");
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = p[i];
  }
  return img;
}

ColorImage read_ppm(const std::filesystem::path& path) {
  try {
    return decode_ppm(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.filename().string() + ": " + e.what());
  }
}

DepthImage read_pgm16(const std::filesystem::path& path) {
  try {
    return decode_pgm16(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.filename().string() + ": " + e.what());
  }
}

Mask read_pgm8(const std::filesystem::path& path) {
  const DepthImage wide = read_pgm16(path);
  Mask m(wide.width(), wide.height());
  for (std::size_t i = 0; i < m.size(); ++i)
    m[i] = static_cast<std::uint8_t>(wide[i] > 255 ? 255 : wide[i]);
  return m;
}

std::string encode_ppm(const ColorImage& image) {
  std::string out = "P6\n" + std::to_string(image.width()) + " " +
                    std::to_string(image.height()) + "\n255\n";
  out.reserve(out.size() + image.size() * 3);
  for (const Rgb& c : image.data()) {
    out.push_back(static_cast<char>(c.r));
    out.push_back(static_cast<char>(c.g));
    out.push_back(static_cast<char>(c.b));
  }
  return out;
}

std::string encode_pgm16(const DepthImage& image) {
  std::string out = "P5\n" + std::to_string(image.width()) + " " +
                    std::to_string(image.height()) + "\n65535\n";
  out.reserve(out.size() + image.size() * 2);
  for (std::uint16_t v : image.data()) {
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

void write_ppm(const std::filesystem::path& path, const ColorImage& image) {
  write_file(path, encode_ppm(image));
}

void write_pgm16(const std::filesystem::path& path, const DepthImage& image) {
  write_file(path, encode_pgm16(image));
}

void write_pgm8(const std::filesystem::path& path, const Mask& image) {
  std::string out = "P5\n" + std::to_string(image.width()) + " " +
                    std::to_string(image.height()) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.data().data()), image.size());
  write_file(path, out);
}

}  // namespace markcut::io
