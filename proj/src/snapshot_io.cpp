#include "imlab/snapshot_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "imlab/errors.hpp"

namespace imlab {

namespace {

constexpr char kMagic[5] = {'I', 'M', 'L', 'B', '1'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw IoError("truncated snapshot");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::uint8_t kind_tag(FieldKind kind) {
  switch (kind) {
    case FieldKind::TorusScalar: return 0;
    case FieldKind::TorusVector: return 1;
    case FieldKind::Shell: return 2;
  }
  return 255;
}

}  // namespace

void write_snapshot(std::ostream& out, const SpectralField& u) {
  out.write(kMagic, sizeof(kMagic));
  put_le<std::uint8_t>(out, kind_tag(u.kind()));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(u.dim()));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(u.components()));
  put_le<std::int32_t>(out, u.cutoff());
  put_le<double>(out, u.geometry().k0);
  put_le<double>(out, u.geometry().lambda);
  for (int i = 0; i < u.size(); ++i) {
    for (int c = 0; c < u.components(); ++c) {
      put_le<double>(out, u.at(i, c).real());
      put_le<double>(out, u.at(i, c).imag());
    }
  }
  if (!out) throw IoError("failed writing snapshot");
}

SpectralField read_snapshot(std::istream& in) {
  char magic[5];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("not an IMLB1 snapshot");
  }
  const auto tag = get_le<std::uint8_t>(in);
  const int d = get_le<std::uint8_t>(in);
  const int k = get_le<std::uint8_t>(in);
  const int n = get_le<std::int32_t>(in);
  ShellGeometry geom;
  geom.k0 = get_le<double>(in);
  geom.lambda = get_le<double>(in);

  SpectralField u;
  switch (tag) {
    case 0: u = SpectralField::torus_scalar(d, n); break;
    case 1: u = SpectralField::torus_vector(d, n, k); break;
    case 2: u = SpectralField::shell(n, geom); break;
    default: throw IoError("unknown snapshot kind tag");
  }
  if (u.components() != k) throw IoError("snapshot component count inconsistent with kind");
  for (int i = 0; i < u.size(); ++i) {
    for (int c = 0; c < u.components(); ++c) {
      const double re = get_le<double>(in);
      const double im = get_le<double>(in);
      u.at(i, c) = Complex(re, im);
    }
  }
  return u;
}

void save_snapshot(const std::string& path, const SpectralField& u) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_snapshot(out, u);
}

SpectralField load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_snapshot(in);
}

void save_snapshots(const std::string& path, const std::vector<SpectralField>& fields) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const auto& f : fields) write_snapshot(out, f);
}

std::vector<SpectralField> load_snapshots(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<SpectralField> fields;
  while (in.peek() != std::char_traits<char>::eof()) fields.push_back(read_snapshot(in));
  return fields;
}

void write_csv(std::ostream& out, const SpectralField& u) {
  out << "mode,component,re,im\n";
  out << std::setprecision(17);
  for (int i = 0; i < u.size(); ++i) {
    const Mode& m = u.modes().mode(i);
    std::string label = std::to_string(m[0]);
    if (!u.is_shell()) {
      for (int a = 1; a < u.dim(); ++a) label += ":" + std::to_string(m[a]);
    }
    for (int c = 0; c < u.components(); ++c) {
      out << label << ',' << c << ',' << u.at(i, c).real() << ',' << u.at(i, c).imag() << '\n';
    }
  }
}

}  // namespace imlab
