#include "leafkit/image_io.hpp"

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>

#include "leafkit/error.hpp"

namespace leafkit {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& c : ext) c = char(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

RgbImage from_interleaved(const std::vector<std::uint8_t>& data, int height, int width,
                          int channels) {
  RgbImage image(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < 3; ++c) {
        const std::size_t base = (std::size_t(y) * width + x) * channels;
        image.channels[c](y, x) = data[base + (channels == 1 ? 0 : c)];
      }
  return image;
}

std::vector<std::uint8_t> to_interleaved(const RgbImage& image) {
  std::vector<std::uint8_t> data(std::size_t(image.height()) * image.width() * 3);
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x)
      for (int c = 0; c < 3; ++c)
        data[(std::size_t(y) * image.width() + x) * 3 + c] = image.channels[c](y, x);
  return data;
}

RgbImage read_png(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str()))
    throw IoError("cannot read PNG " + path.string() + ": " + png.message);
  png.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, data.data(), 0, nullptr)) {
    png_image_free(&png);
    throw IoError("cannot decode PNG " + path.string() + ": " + png.message);
  }
  return from_interleaved(data, int(png.height), int(png.width), 3);
}

// Skips whitespace and '#' comments between PNM header tokens.
int pnm_token(std::istream& in) {
  int ch;
  while ((ch = in.peek()) != EOF) {
    if (ch == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      break;
    }
  }
  int value = -1;
  in >> value;
  return value;
}

RgbImage read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || (magic[1] != '6' && magic[1] != '5'))
    throw IoError(path.string() + ": only binary P5/P6 images are supported");
  const int channels = magic[1] == '6' ? 3 : 1;
  const int width = pnm_token(in);
  const int height = pnm_token(in);
  const int maxval = pnm_token(in);
  if (width <= 0 || height <= 0 || maxval != 255)
    throw IoError(path.string() + ": unsupported PNM header");
  in.get();
  std::vector<std::uint8_t> data(std::size_t(width) * height * channels);
  in.read(reinterpret_cast<char*>(data.data()), std::streamsize(data.size()));
  if (!in) throw IoError(path.string() + ": truncated pixel data");
  return from_interleaved(data, height, width, channels);
}

}  // namespace

RgbImage read_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("image not found: " + path.string());
  const std::string ext = lower_extension(path);
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return read_pnm(path);
  throw IoError("unsupported image type: " + path.string());
}

void write_image(const std::filesystem::path& path, const RgbImage& image) {
  const std::string ext = lower_extension(path);
  const auto data = to_interleaved(image);
  if (ext == ".png") {
    png_image png;
    std::memset(&png, 0, sizeof png);
    png.version = PNG_IMAGE_VERSION;
    png.width = png_uint_32(image.width());
    png.height = png_uint_32(image.height());
    png.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.c_str(), 0, data.data(), 0, nullptr))
      throw IoError("cannot write PNG " + path.string() + ": " + png.message);
    return;
  }
  if (ext == ".ppm") {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
    if (!out) throw IoError("write failed for " + path.string());
    return;
  }
  throw IoError("unsupported image type: " + path.string());
}

}  // namespace leafkit
