#include "hypo/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "hypo/errors.hpp"

namespace hypo {

namespace fs = std::filesystem;

namespace {

std::vector<unsigned char> readAll(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void writeAll(const fs::path& path, const std::vector<unsigned char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

// Minimal netpbm header tokenizer: skips whitespace and '#' comments.
class PnmHeader {
 public:
  PnmHeader(const std::vector<unsigned char>& bytes, const fs::path& path)
      : bytes_(bytes), path_(path) {}

  std::string magic() {
    if (bytes_.size() < 2) fail("file too short");
    pos_ = 2;
    return {static_cast<char>(bytes_[0]), static_cast<char>(bytes_[1])};
  }

  long number() {
    skipSpaceAndComments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail("malformed header");
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > (1L << 30)) fail("header value out of range");
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t rasterStart() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail("malformed header");
    return pos_ + 1;
  }

  std::size_t position() const { return pos_; }

  [[noreturn]] void fail(const std::string& why) const {
    throw IoError("'" + path_.string() + "': " + why);
  }

 private:
  void skipSpaceAndComments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

Image loadPgm(const fs::path& path) {
  const auto bytes = readAll(path);
  PnmHeader header(bytes, path);
  const std::string magic = header.magic();
  if (magic == "P6" || magic == "P3") header.fail("color (PPM) images are not supported");
  if (magic == "P4" || magic == "P1") header.fail("bitmap (PBM) images are not supported");
  if (magic != "P5" && magic != "P2") header.fail("not a PGM file (magic '" + magic + "')");

  const long width = header.number();
  const long height = header.number();
  const long maxval = header.number();
  if (width <= 0 || height <= 0) header.fail("non-positive dimensions");
  if (maxval <= 0 || maxval > 65535) {
    header.fail("unsupported bit depth (maxval " + std::to_string(maxval) + ")");
  }

  const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> data(count);
  const double denom = static_cast<double>(maxval);

  if (magic == "P2") {
    for (std::size_t i = 0; i < count; ++i) {
      const long v = header.number();
      if (v > maxval) header.fail("sample exceeds maxval");
      data[i] = static_cast<double>(v) / denom;
    }
  } else {
    const std::size_t start = header.rasterStart();
    const std::size_t sampleBytes = maxval > 255 ? 2 : 1;
    if (bytes.size() < start + count * sampleBytes) header.fail("truncated raster");
    for (std::size_t i = 0; i < count; ++i) {
      long v = 0;
      if (sampleBytes == 1) {
        v = bytes[start + i];
      } else {
        v = (static_cast<long>(bytes[start + 2 * i]) << 8) | bytes[start + 2 * i + 1];
      }
      if (v > maxval) header.fail("sample exceeds maxval");
      data[i] = static_cast<double>(v) / denom;
    }
  }
  return Image(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

void savePgm(const Image& img, const fs::path& path) {
  const std::string header = "P5\n" + std::to_string(img.width()) + " " +
                             std::to_string(img.height()) + "\n255\n";
  std::vector<unsigned char> bytes(header.begin(), header.end());
  bytes.reserve(bytes.size() + img.size());
  for (double v : img.data()) bytes.push_back(quantize(v));
  writeAll(path, bytes);
}

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image loadPng(const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open '" + path.string() + "' for reading");

  png_byte signature[8] = {};
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    throw IoError("'" + path.string() + "': not a PNG file");
  }

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialization failed");
  }

  std::vector<png_byte> raster;
  std::vector<png_bytep> rows;
  std::string problem;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bitDepth = 0;
  int colorType = 0;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("'" + path.string() + "': corrupt PNG data");
  }

  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  png_get_IHDR(png, info, &width, &height, &bitDepth, &colorType, nullptr, nullptr, nullptr);

  if (colorType != PNG_COLOR_TYPE_GRAY) {
    problem = colorType == PNG_COLOR_TYPE_GRAY_ALPHA ? "grayscale+alpha PNG is not supported"
                                                      : "color PNG images are not supported";
  } else if (bitDepth != 8 && bitDepth != 16) {
    problem = "unsupported bit depth " + std::to_string(bitDepth) + " (need 8 or 16)";
  }
  if (!problem.empty()) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("'" + path.string() + "': " + problem);
  }

  const std::size_t rowBytes = png_get_rowbytes(png, info);
  raster.resize(rowBytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = raster.data() + y * rowBytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  std::vector<double> data(static_cast<std::size_t>(width) * height);
  if (bitDepth == 8) {
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = raster[i] / 255.0;
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) {
      data[i] = ((raster[2 * i] << 8) | raster[2 * i + 1]) / 65535.0;
    }
  }
  return Image(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

void savePng(const Image& img, const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot open '" + path.string() + "' for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialization failed");
  }

  std::vector<png_byte> raster(img.size());
  std::transform(img.data().begin(), img.data().end(), raster.begin(), quantize);
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y) rows[y] = raster.data() + static_cast<std::size_t>(y) * img.width();

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("write to '" + path.string() + "' failed");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void putU32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t getU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

ImageFormat formatFromPath(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".pgm") return ImageFormat::Pgm;
  if (ext == ".png") return ImageFormat::Png;
  throw IoError("cannot infer image format from '" + path.string() + "' (use .pgm or .png)");
}

Image loadImage(const fs::path& path, ImageFormat format) {
  return format == ImageFormat::Pgm ? loadPgm(path) : loadPng(path);
}

Image loadImage(const fs::path& path) { return loadImage(path, formatFromPath(path)); }

void saveImage(const Image& img, const fs::path& path, ImageFormat format) {
  if (format == ImageFormat::Pgm) {
    savePgm(img, path);
  } else {
    savePng(img, path);
  }
}

void saveImage(const Image& img, const fs::path& path) { saveImage(img, path, formatFromPath(path)); }

std::uint8_t quantize(double value) noexcept {
  if (!(value > 0.0)) return 0;  // also maps NaN to 0
  if (value >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::floor(value * 255.0 + 0.5));
}

Mask loadMask(const fs::path& path) {
  const Image img = loadImage(path);
  Mask mask(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) mask.setBad(i, quantize(img.data()[i]) >= 128);
  return mask;
}

void saveMask(const Mask& mask, const fs::path& path) {
  Image img(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) img.data()[i] = mask.bad(i) ? 1.0 : 0.0;
  saveImage(img, path);
}

void saveLifted(const LiftedField& field, const fs::path& path) {
  std::vector<unsigned char> bytes(kLiftedMagic, kLiftedMagic + 5);
  bytes.reserve(kLiftedHeaderBytes + field.data().size() * 8);
  putU32(bytes, static_cast<std::uint32_t>(field.orientations()));
  putU32(bytes, static_cast<std::uint32_t>(field.width()));
  putU32(bytes, static_cast<std::uint32_t>(field.height()));
  for (double v : field.data()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<unsigned char>(bits >> (8 * i)));
  }
  writeAll(path, bytes);
}

LiftedField loadLifted(const fs::path& path) {
  const auto bytes = readAll(path);
  const std::string where = "'" + path.string() + "': ";
  if (bytes.size() < kLiftedHeaderBytes) throw IoError(where + "truncated lifted-field header");
  if (std::memcmp(bytes.data(), kLiftedMagic, 5) != 0) {
    throw IoError(where + "bad magic (expected SRLF1)");
  }
  const std::uint32_t n = getU32(bytes.data() + 5);
  const std::uint32_t width = getU32(bytes.data() + 9);
  const std::uint32_t height = getU32(bytes.data() + 13);
  if (n == 0 || width == 0 || height == 0) {
    throw IoError(where + "zero dimension in header (N=" + std::to_string(n) +
                  ", width=" + std::to_string(width) + ", height=" + std::to_string(height) + ")");
  }
  if (n > (1u << 16) || width > (1u << 20) || height > (1u << 20)) {
    throw IoError(where + "implausible dimensions in header");
  }
  const std::size_t count = static_cast<std::size_t>(n) * width * height;
  const std::size_t expected = kLiftedHeaderBytes + count * 8;
  if (bytes.size() < expected) throw IoError(where + "truncated payload");
  if (bytes.size() > expected) throw IoError(where + "trailing bytes after payload");

  std::vector<double> data(count);
  const unsigned char* p = bytes.data() + kLiftedHeaderBytes;
  for (std::size_t i = 0; i < count; ++i, p += 8) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    data[i] = std::bit_cast<double>(bits);
  }
  return LiftedField(AngleGrid(static_cast<int>(n)), static_cast<int>(width),
                     static_cast<int>(height), std::move(data));
}

}  // namespace hypo
