#include "cinediff/io.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace cinediff {

namespace {

constexpr std::array<char, 4> kMagic = {'K', 'D', 'S', '1'};
constexpr std::size_t kHeaderSize = 24;
constexpr std::uint8_t kDtypeComplex = 0;
constexpr std::uint8_t kDtypeMask = 1;

void put_u32le(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v & 0xff);
  p[1] = static_cast<std::uint8_t>((v >> 8) & 0xff);
  p[2] = static_cast<std::uint8_t>((v >> 16) & 0xff);
  p[3] = static_cast<std::uint8_t>((v >> 24) & 0xff);
}

std::uint32_t get_u32le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_f32le(std::uint8_t* p, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32le(p, bits);
}

float get_f32le(const std::uint8_t* p) {
  const std::uint32_t bits = get_u32le(p);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

struct Header {
  std::uint32_t nx = 0, ny = 0, nt = 0;
  std::uint8_t domain = 0;
  std::uint8_t dtype = 0;
};

void write_header(std::ofstream& out, const Header& h) {
  std::array<std::uint8_t, kHeaderSize> buf{};
  std::memcpy(buf.data(), kMagic.data(), 4);
  put_u32le(buf.data() + 4, h.nx);
  put_u32le(buf.data() + 8, h.ny);
  put_u32le(buf.data() + 12, h.nt);
  buf[16] = h.domain;
  buf[17] = h.dtype;
  out.write(reinterpret_cast<const char*>(buf.data()), kHeaderSize);
}

Header read_header(std::ifstream& in, const std::filesystem::path& path) {
  std::array<std::uint8_t, kHeaderSize> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), kHeaderSize);
  if (in.gcount() != static_cast<std::streamsize>(kHeaderSize)) {
    throw Error(ErrorKind::Truncated, "header shorter than 24 bytes in " + path.string());
  }
  if (std::memcmp(buf.data(), kMagic.data(), 4) != 0) {
    throw Error(ErrorKind::BadMagic, "not a KDS1 file: " + path.string());
  }
  Header h;
  h.nx = get_u32le(buf.data() + 4);
  h.ny = get_u32le(buf.data() + 8);
  h.nt = get_u32le(buf.data() + 12);
  h.domain = buf[16];
  h.dtype = buf[17];
  if (h.nx == 0 || h.ny == 0 || h.nt == 0) {
    std::ostringstream msg;
    msg << "zero dimension in header of " << path.string() << " (" << h.nx << "x" << h.ny << "x"
        << h.nt << ")";
    throw Error(ErrorKind::DegenerateShape, msg.str());
  }
  if (h.domain > 1) {
    throw Error(ErrorKind::InvalidArgument, "unknown domain byte in " + path.string());
  }
  if (h.dtype > 1) {
    throw Error(ErrorKind::DtypeMismatch, "unknown dtype byte in " + path.string());
  }
  return h;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open for reading: " + path.string());
  return in;
}

}  // namespace

void write_series(const DynamicSeries& series, const std::filesystem::path& path) {
  validate(series).require();
  auto out = open_out(path);
  Header h;
  h.nx = static_cast<std::uint32_t>(series.nx);
  h.ny = static_cast<std::uint32_t>(series.ny);
  h.nt = static_cast<std::uint32_t>(series.nt);
  h.domain = static_cast<std::uint8_t>(series.domain);
  h.dtype = kDtypeComplex;
  write_header(out, h);

  std::vector<std::uint8_t> buf(series.frame_size() * 8);
  for (int t = 0; t < series.nt; ++t) {
    auto frame = series.frame(t);
    for (std::size_t i = 0; i < frame.size(); ++i) {
      put_f32le(buf.data() + i * 8, static_cast<float>(frame[i].real()));
      put_f32le(buf.data() + i * 8 + 4, static_cast<float>(frame[i].imag()));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

DynamicSeries read_series(const std::filesystem::path& path) {
  auto in = open_in(path);
  const Header h = read_header(in, path);
  if (h.dtype != kDtypeComplex) {
    throw Error(ErrorKind::DtypeMismatch, "expected complex payload in " + path.string());
  }
  DynamicSeries series(static_cast<int>(h.nx), static_cast<int>(h.ny), static_cast<int>(h.nt),
                       static_cast<Domain>(h.domain));
  std::vector<std::uint8_t> buf(series.frame_size() * 8);
  for (int t = 0; t < series.nt; ++t) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
      throw Error(ErrorKind::Truncated, "payload shorter than header implies: " + path.string());
    }
    auto frame = series.frame(t);
    for (std::size_t i = 0; i < frame.size(); ++i) {
      frame[i] = Complex(get_f32le(buf.data() + i * 8), get_f32le(buf.data() + i * 8 + 4));
    }
  }
  validate(series).require();
  return series;
}

void write_mask(const SamplingMask& mask, const std::filesystem::path& path) {
  validate(mask).require();
  auto out = open_out(path);
  Header h;
  h.nx = static_cast<std::uint32_t>(mask.nx);
  h.ny = static_cast<std::uint32_t>(mask.ny);
  h.nt = static_cast<std::uint32_t>(mask.nt);
  h.domain = static_cast<std::uint8_t>(Domain::KSpace);
  h.dtype = kDtypeMask;
  write_header(out, h);
  out.write(reinterpret_cast<const char*>(mask.acquired.data()),
            static_cast<std::streamsize>(mask.acquired.size()));
  if (!out) throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

SamplingMask read_mask(const std::filesystem::path& path) {
  auto in = open_in(path);
  const Header h = read_header(in, path);
  if (h.dtype != kDtypeMask) {
    throw Error(ErrorKind::DtypeMismatch, "expected mask payload in " + path.string());
  }
  SamplingMask mask(static_cast<int>(h.nx), static_cast<int>(h.ny), static_cast<int>(h.nt));
  in.read(reinterpret_cast<char*>(mask.acquired.data()),
          static_cast<std::streamsize>(mask.acquired.size()));
  if (in.gcount() != static_cast<std::streamsize>(mask.acquired.size())) {
    throw Error(ErrorKind::Truncated, "payload shorter than header implies: " + path.string());
  }
  validate(mask).require();
  return mask;
}

int kds_dtype(const std::filesystem::path& path) {
  auto in = open_in(path);
  const Header h = read_header(in, path);
  return h.dtype;
}

}  // namespace cinediff
