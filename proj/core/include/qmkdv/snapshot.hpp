#pragma once

#include <filesystem>
#include <string>

#include "qmkdv/spectral_core.hpp"

namespace qmkdv {

struct Snapshot {
  SpectralField field;
  std::string coefficient_id;
};

// Binary layout: "QMKDV1", u64 n, f64 L, f64 t, u64 id length, id bytes,
// then (re, im) f64 pairs for j = -n/2 .. n/2-1. All little-endian.
void write_snapshot(const std::filesystem::path& path, const SpectralField& field,
                    const std::string& coefficient_id);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace qmkdv
