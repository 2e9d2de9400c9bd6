#include "qmkdv/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "qmkdv/error.hpp"

namespace qmkdv {

namespace {

constexpr char kMagic[6] = {'Q', 'M', 'K', 'D', 'V', '1'};

static_assert(std::endian::native == std::endian::little,
              "snapshot I/O assumes a little-endian host");

template <typename T>
void put(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw Error(ErrorKind::IoError, "truncated snapshot " + path.string());
  }
  return value;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const SpectralField& field,
                    const std::string& coefficient_id) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(out, field.grid().n());
  put<double>(out, field.grid().length());
  put<double>(out, field.time());
  put<std::uint64_t>(out, coefficient_id.size());
  out.write(coefficient_id.data(), static_cast<std::streamsize>(coefficient_id.size()));
  for (const auto& c : signed_order(field)) {
    put<double>(out, c.real());
    put<double>(out, c.imag());
  }
  if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorKind::IoError, "bad snapshot magic in " + path.string());
  }
  const auto n = get<std::uint64_t>(in, path);
  const auto length = get<double>(in, path);
  const auto time = get<double>(in, path);
  const auto id_len = get<std::uint64_t>(in, path);
  if (id_len > 4096) throw Error(ErrorKind::IoError, "implausible identifier length in " + path.string());
  std::string id(id_len, '\0');
  if (!in.read(id.data(), static_cast<std::streamsize>(id_len))) {
    throw Error(ErrorKind::IoError, "truncated snapshot " + path.string());
  }
  std::vector<cplx> ordered(n);
  for (auto& c : ordered) {
    const double re = get<double>(in, path);
    const double im = get<double>(in, path);
    c = {re, im};
  }
  const GridSpec grid(n, length);
  return {from_signed_order(grid, ordered, time), id};
}

}  // namespace qmkdv
