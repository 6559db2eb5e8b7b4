#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "imlab/spectral_field.hpp"

namespace imlab {

// Binary snapshot layout, all little-endian:
//   "IMLB1"           5 bytes magic
//   kind              u8   (0 torus-scalar, 1 torus-vector, 2 shell)
//   d                 u8
//   k                 u8   components
//   N                 i32  eigenvalue cutoff or shell count
//   k0, lambda        f64  shell parameters (1, 2 for torus fields)
// followed by (re, im) f64 pairs, mode-major in lexicographic mode order and
// component-minor.

void write_snapshot(std::ostream& out, const SpectralField& u);
SpectralField read_snapshot(std::istream& in);

void save_snapshot(const std::string& path, const SpectralField& u);
SpectralField load_snapshot(const std::string& path);

/// Several snapshots back to back in one file.
void save_snapshots(const std::string& path, const std::vector<SpectralField>& fields);
std::vector<SpectralField> load_snapshots(const std::string& path);

/// CSV with header `mode,component,re,im`; the mode column is the wave vector
/// joined by ':' (e.g. `1:-2`) or the shell number.
void write_csv(std::ostream& out, const SpectralField& u);

}  // namespace imlab
