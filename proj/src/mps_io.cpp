#include "foldtn/mps_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <string>

#include "foldtn/errors.hpp"

namespace foldtn::mps_io {

namespace {

static_assert(std::endian::native == std::endian::little, "binary MPS format assumes a little-endian host");

constexpr std::array<char, 8> kMagic = {'F', 'O', 'L', 'D', 'T', 'N', 'M', 'P'};
constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 32;

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw ShapeError("mps_io: truncated binary stream");
  return v;
}

std::uint64_t get_dim(std::istream& in) {
  const auto d = get<std::uint64_t>(in);
  if (d == 0 || d > kMaxDim) throw ShapeError("mps_io: implausible dimension " + std::to_string(d));
  return d;
}

void put_values(std::ostream& out, const cplx* p, Index n) {
  for (Index i = 0; i < n; ++i) {
    put(out, p[i].real());
    put(out, p[i].imag());
  }
}

void get_values(std::istream& in, cplx* p, Index n) {
  for (Index i = 0; i < n; ++i) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    p[i] = {re, im};
  }
}

void put_vector(std::ostream& out, const ComplexVector& v) {
  put<std::uint64_t>(out, static_cast<std::uint64_t>(v.size()));
  put_values(out, v.data(), v.size());
}

ComplexVector get_vector(std::istream& in) {
  ComplexVector v(static_cast<Index>(get_dim(in)));
  get_values(in, v.data(), v.size());
  return v;
}

struct TextReader {
  std::istream& in;

  std::uint64_t dim() {
    std::uint64_t d = 0;
    if (!(in >> d) || d == 0 || d > kMaxDim) throw ShapeError("mps_io: bad dimension in text dump");
    return d;
  }
  cplx value() {
    double re = 0.0, im = 0.0;
    if (!(in >> re >> im)) throw ShapeError("mps_io: truncated text dump");
    return {re, im};
  }
};

}  // namespace

void write_binary(std::ostream& out, const MatrixProductState& s) {
  s.validate();
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kFormatVersion);
  put<std::uint32_t>(out, 0);
  put<std::uint64_t>(out, s.size());
  put_vector(out, s.left);
  put_vector(out, s.right);
  for (const auto& t : s.sites) {
    put<std::uint64_t>(out, static_cast<std::uint64_t>(t.left_dim()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(t.phys()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(t.right_dim()));
    for (const auto& a : t.m) put_values(out, a.data(), a.size());
  }
  if (!out) throw ShapeError("mps_io: write failed");
}

MatrixProductState read_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ShapeError("mps_io: not an MPS container");
  const auto version = get<std::uint32_t>(in);
  if (version != kFormatVersion) throw ShapeError("mps_io: unsupported format version " + std::to_string(version));
  get<std::uint32_t>(in);

  MatrixProductState s;
  const auto n = get_dim(in);
  s.left = get_vector(in);
  s.right = get_vector(in);
  s.sites.resize(n);
  for (auto& t : s.sites) {
    const auto dl = static_cast<Index>(get_dim(in));
    const auto d = get_dim(in);
    const auto dr = static_cast<Index>(get_dim(in));
    t.m.assign(d, ComplexMatrix(dl, dr));
    for (auto& a : t.m) get_values(in, a.data(), a.size());
  }
  s.validate();
  return s;
}

void save(const std::filesystem::path& path, const MatrixProductState& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ShapeError("mps_io: cannot open " + path.string() + " for writing");
  write_binary(out, s);
}

MatrixProductState load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ShapeError("mps_io: cannot open " + path.string());
  return read_binary(in);
}

void write_text(std::ostream& out, const MatrixProductState& s) {
  s.validate();
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(17);
  auto values = [&out](const cplx* p, Index n) {
    for (Index i = 0; i < n; ++i) out << p[i].real() << ' ' << p[i].imag() << '\n';
  };
  out << "FOLDTNMP " << kFormatVersion << '\n' << s.size() << '\n';
  out << s.left.size() << '\n';
  values(s.left.data(), s.left.size());
  out << s.right.size() << '\n';
  values(s.right.data(), s.right.size());
  for (const auto& t : s.sites) {
    out << t.left_dim() << ' ' << t.phys() << ' ' << t.right_dim() << '\n';
    for (const auto& a : t.m) values(a.data(), a.size());
  }
  out.flags(flags);
  out.precision(prec);
}

MatrixProductState read_text(std::istream& in) {
  std::string magic;
  std::uint32_t version = 0;
  if (!(in >> magic >> version) || magic != "FOLDTNMP") throw ShapeError("mps_io: not an MPS text dump");
  if (version != kFormatVersion) throw ShapeError("mps_io: unsupported format version " + std::to_string(version));
  TextReader r{in};
  MatrixProductState s;
  const auto n = r.dim();
  s.left.resize(static_cast<Index>(r.dim()));
  for (Index i = 0; i < s.left.size(); ++i) s.left(i) = r.value();
  s.right.resize(static_cast<Index>(r.dim()));
  for (Index i = 0; i < s.right.size(); ++i) s.right(i) = r.value();
  s.sites.resize(n);
  for (auto& t : s.sites) {
    const auto dl = static_cast<Index>(r.dim());
    const auto d = r.dim();
    const auto dr = static_cast<Index>(r.dim());
    t.m.assign(d, ComplexMatrix(dl, dr));
    for (auto& a : t.m)
      for (Index i = 0; i < a.size(); ++i) a.data()[i] = r.value();
  }
  s.validate();
  return s;
}

}  // namespace foldtn::mps_io
