// Copyright 2026 importantaug contributors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "importantaug/png_image.hpp"

#include <zlib.h>

#include <cstdlib>
#include <cstring>
#include <fstream>

#include "importantaug/errors.hpp"

namespace importantaug {

namespace {

const unsigned char kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

void put_u32be(std::vector<unsigned char>& out, uint32_t v) {
  out.push_back(static_cast<unsigned char>(v >> 24));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v));
}

uint32_t get_u32be(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) << 24 | static_cast<uint32_t>(p[1]) << 16 |
         static_cast<uint32_t>(p[2]) << 8 | static_cast<uint32_t>(p[3]);
}

void append_chunk(std::vector<unsigned char>& out, const char type[4],
                  const std::vector<unsigned char>& body) {
  put_u32be(out, static_cast<uint32_t>(body.size()));
  const size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), body.begin(), body.end());
  const uLong crc = crc32(0L, out.data() + crc_start, static_cast<uInt>(4 + body.size()));
  put_u32be(out, static_cast<uint32_t>(crc));
}

int paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

void write_png_gray8(const std::filesystem::path& path, const GrayImage& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != static_cast<size_t>(image.width) * static_cast<size_t>(image.height))
    throw InvalidInputError("write_png_gray8: inconsistent image dimensions");

  // Raw scanlines, each prefixed with filter byte 0 (None).
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<size_t>(image.height) * (static_cast<size_t>(image.width) + 1));
  for (int r = 0; r < image.height; ++r) {
    raw.push_back(0);
    const size_t off = static_cast<size_t>(r) * static_cast<size_t>(image.width);
    raw.insert(raw.end(), image.pixels.begin() + static_cast<long>(off),
               image.pixels.begin() + static_cast<long>(off + static_cast<size_t>(image.width)));
  }

  uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> compressed(compressed_size);
  if (compress2(compressed.data(), &compressed_size, raw.data(),
                static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw NumericError("write_png_gray8: zlib compression failed");
  compressed.resize(compressed_size);

  std::vector<unsigned char> ihdr;
  put_u32be(ihdr, static_cast<uint32_t>(image.width));
  put_u32be(ihdr, static_cast<uint32_t>(image.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // color type: grayscale
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter method
  ihdr.push_back(0);  // no interlace

  std::vector<unsigned char> file(kPngSignature, kPngSignature + 8);
  append_chunk(file, "IHDR", ihdr);
  append_chunk(file, "IDAT", compressed);
  append_chunk(file, "IEND", {});

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("png '" + path.string() + "': cannot open for writing");
  out.write(reinterpret_cast<const char*>(file.data()), static_cast<long>(file.size()));
  if (!out) throw DataError("png '" + path.string() + "': write failed");
}

GrayImage read_png_gray8(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("png '" + path.string() + "': cannot open file");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kPngSignature, 8) != 0)
    throw DataError("png '" + path.string() + "': bad signature");

  GrayImage image;
  std::vector<unsigned char> idat;
  size_t pos = 8;
  bool have_ihdr = false;
  while (pos + 12 <= bytes.size()) {
    const uint32_t size = get_u32be(bytes.data() + pos);
    const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
    const unsigned char* body = bytes.data() + pos + 8;
    if (pos + 12 + size > bytes.size())
      throw DataError("png '" + path.string() + "': truncated chunk");
    if (std::memcmp(type, "IHDR", 4) == 0) {
      image.width = static_cast<int>(get_u32be(body));
      image.height = static_cast<int>(get_u32be(body + 4));
      if (body[8] != 8 || body[9] != 0 || body[12] != 0)
        throw DataError("png '" + path.string() +
                        "': only 8-bit grayscale non-interlaced images are supported");
      have_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), body, body + size);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + size;
  }
  if (!have_ihdr || image.width <= 0 || image.height <= 0)
    throw DataError("png '" + path.string() + "': missing or bad IHDR");

  const size_t stride = static_cast<size_t>(image.width);
  std::vector<unsigned char> raw(static_cast<size_t>(image.height) * (stride + 1));
  uLongf raw_size = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &raw_size, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      raw_size != raw.size())
    throw DataError("png '" + path.string() + "': zlib inflate failed");

  image.pixels.assign(static_cast<size_t>(image.height) * stride, 0);
  for (int r = 0; r < image.height; ++r) {
    const unsigned char filter = raw[static_cast<size_t>(r) * (stride + 1)];
    const unsigned char* src = raw.data() + static_cast<size_t>(r) * (stride + 1) + 1;
    unsigned char* dst = image.pixels.data() + static_cast<size_t>(r) * stride;
    const unsigned char* up = r > 0 ? dst - stride : nullptr;
    for (size_t c = 0; c < stride; ++c) {
      const int left = c > 0 ? dst[c - 1] : 0;
      const int above = up ? up[c] : 0;
      const int upper_left = (up && c > 0) ? up[c - 1] : 0;
      int v = src[c];
      switch (filter) {
        case 0: break;
        case 1: v += left; break;
        case 2: v += above; break;
        case 3: v += (left + above) / 2; break;
        case 4: v += paeth(left, above, upper_left); break;
        default:
          throw DataError("png '" + path.string() + "': unknown scanline filter");
      }
      dst[c] = static_cast<unsigned char>(v & 0xFF);
    }
  }
  return image;
}

}  // namespace importantaug
