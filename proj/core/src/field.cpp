#include "orlicz/field.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "orlicz/errors.hpp"

namespace orlicz {

double SampledField::magnitude(std::size_t cell) const {
  if (components == 1) return std::abs(values[cell]);
  double s = 0.0;
  for (int c = 0; c < components; ++c) {
    const double v = value(c, cell);
    s += v * v;
  }
  return std::sqrt(s);
}

void SampledField::validate() const {
  grid.validate();
  if (components != 1 && components != grid.dim) {
    throw GridError("field must have 1 or dim components, got " +
                    std::to_string(components));
  }
  if (values.size() != static_cast<std::size_t>(components) * grid.size()) {
    throw GridError("field value array does not match grid size");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("field contains non-finite values");
  }
}

SampledField make_scalar(const Grid& g, double fill) {
  SampledField f;
  f.grid = g;
  f.components = 1;
  f.values.assign(g.size(), fill);
  return f;
}

SampledField make_vector(const Grid& g) {
  SampledField f;
  f.grid = g;
  f.components = g.dim;
  f.values.assign(static_cast<std::size_t>(g.dim) * g.size(), 0.0);
  return f;
}

SampledField sample_scalar(const Grid& g,
                           const std::function<double(double, double, double)>& fn) {
  SampledField f = make_scalar(g);
  for (int k = 0; k < g.extents[2]; ++k) {
    for (int j = 0; j < g.extents[1]; ++j) {
      for (int i = 0; i < g.extents[0]; ++i) {
        const std::size_t idx = g.index(i, j, k);
        if (!g.inside[idx]) continue;
        const auto c = g.center(i, j, k);
        f.values[idx] = fn(c[0], c[1], c[2]);
      }
    }
  }
  return f;
}

SampledField random_field(const Grid& g, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  SampledField f = make_scalar(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g.inside[idx]) f.values[idx] = dist(rng);
  }
  return f;
}

SampledField derivative(const SampledField& f, int axis, DerivativeStats* stats) {
  f.validate();
  if (f.components != 1) {
    throw PreconditionError("derivative expects a scalar field");
  }
  const Grid& g = f.grid;
  if (axis < 0 || axis >= g.dim) {
    throw GridError("derivative axis out of range for grid dimension");
  }
  if (g.extents[axis] < 3) {
    throw GridError("derivative needs >= 3 cells along axis " +
                    std::to_string(axis));
  }
  const double h = g.spacing[axis];
  SampledField d = make_scalar(g);
  int step[3] = {0, 0, 0};
  step[axis] = 1;

  auto val = [&](int i, int j, int k) { return f.values[g.index(i, j, k)]; };

  for (int k = 0; k < g.extents[2]; ++k) {
    for (int j = 0; j < g.extents[1]; ++j) {
      for (int i = 0; i < g.extents[0]; ++i) {
        const std::size_t idx = g.index(i, j, k);
        if (!g.inside[idx]) continue;
        const bool in_p1 = g.is_inside(i + step[0], j + step[1], k + step[2]);
        const bool in_m1 = g.is_inside(i - step[0], j - step[1], k - step[2]);
        const bool in_p2 =
            g.is_inside(i + 2 * step[0], j + 2 * step[1], k + 2 * step[2]);
        const bool in_m2 =
            g.is_inside(i - 2 * step[0], j - 2 * step[1], k - 2 * step[2]);
        const double f0 = f.values[idx];
        double dv = 0.0;
        if (in_p1 && in_m1) {
          dv = (val(i + step[0], j + step[1], k + step[2]) -
                val(i - step[0], j - step[1], k - step[2])) /
               (2.0 * h);
        } else if (in_p1 && in_p2) {
          dv = (-3.0 * f0 +
                4.0 * val(i + step[0], j + step[1], k + step[2]) -
                val(i + 2 * step[0], j + 2 * step[1], k + 2 * step[2])) /
               (2.0 * h);
        } else if (in_m1 && in_m2) {
          dv = (3.0 * f0 -
                4.0 * val(i - step[0], j - step[1], k - step[2]) +
                val(i - 2 * step[0], j - 2 * step[1], k - 2 * step[2])) /
               (2.0 * h);
        } else if (in_p1) {
          dv = (val(i + step[0], j + step[1], k + step[2]) - f0) / h;
          if (stats) ++stats->first_order_cells;
        } else if (in_m1) {
          dv = (f0 - val(i - step[0], j - step[1], k - step[2])) / h;
          if (stats) ++stats->first_order_cells;
        } else {
          // Single-cell chord: no variation observable along this axis.
          dv = 0.0;
          if (stats) ++stats->zero_information_cells;
        }
        d.values[idx] = dv;
      }
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// I/O

namespace {

std::string hexfloat(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_hexfloat(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("field csv: cannot parse value '" + s + "'");
  }
  if (pos != s.size()) {
    throw ConfigError("field csv: trailing characters in value '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  return out;
}

constexpr char kBinaryMagic[8] = {'O', 'R', 'L', 'C', 'Z', 'F', '1', '\0'};

template <typename T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_raw(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw ConfigError("field binary: truncated stream");
}

}  // namespace

void write_field_csv(const SampledField& f, const std::string& path) {
  f.validate();
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  os << "orlicz-field-csv,1\n";
  os << "dim," << f.grid.dim << "\n";
  os << "extents," << f.grid.extents[0] << "," << f.grid.extents[1] << ","
     << f.grid.extents[2] << "\n";
  os << "spacing," << hexfloat(f.grid.spacing[0]) << ","
     << hexfloat(f.grid.spacing[1]) << "," << hexfloat(f.grid.spacing[2])
     << "\n";
  os << "origin," << hexfloat(f.grid.origin[0]) << ","
     << hexfloat(f.grid.origin[1]) << "," << hexfloat(f.grid.origin[2]) << "\n";
  os << "components," << f.components << "\n";
  os << "boundary," << static_cast<int>(f.boundary) << "\n";
  os << "mask,";
  for (auto flag : f.grid.inside) os << (flag ? '1' : '0');
  os << "\n";
  os << "values," << f.values.size() << "\n";
  for (double v : f.values) os << hexfloat(v) << "\n";
  if (!os) throw ConfigError("write failure on '" + path + "'");
}

SampledField read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open '" + path + "' for reading");
  std::string line;
  auto next = [&](const std::string& key) {
    if (!std::getline(is, line)) {
      throw ConfigError("field csv: missing '" + key + "' line");
    }
    auto parts = split_csv(line);
    if (parts.empty() || parts[0] != key) {
      throw ConfigError("field csv: expected '" + key + "' line, got '" +
                        line + "'");
    }
    return parts;
  };

  auto magic = next("orlicz-field-csv");
  if (magic.size() != 2 || magic[1] != "1") {
    throw ConfigError("field csv: unsupported version");
  }
  SampledField f;
  f.grid.dim = std::stoi(next("dim").at(1));
  auto ext = next("extents");
  auto spc = next("spacing");
  auto org = next("origin");
  for (int a = 0; a < 3; ++a) {
    f.grid.extents[a] = std::stoi(ext.at(a + 1));
    f.grid.spacing[a] = parse_hexfloat(spc.at(a + 1));
    f.grid.origin[a] = parse_hexfloat(org.at(a + 1));
  }
  f.components = std::stoi(next("components").at(1));
  f.boundary = static_cast<BoundaryConvention>(std::stoi(next("boundary").at(1)));
  auto mask = next("mask");
  if (mask.size() != 2 || mask[1].size() != f.grid.size()) {
    throw ConfigError("field csv: mask length mismatch");
  }
  f.grid.inside.resize(f.grid.size());
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    f.grid.inside[i] = mask[1][i] == '1';
  }
  const std::size_t nvalues = std::stoull(next("values").at(1));
  f.values.resize(nvalues);
  for (std::size_t i = 0; i < nvalues; ++i) {
    if (!std::getline(is, line)) {
      throw ConfigError("field csv: truncated value block");
    }
    f.values[i] = parse_hexfloat(line);
  }
  f.validate();
  return f;
}

void write_field_binary(const SampledField& f, const std::string& path) {
  f.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  os.write(kBinaryMagic, sizeof kBinaryMagic);
  write_raw(os, static_cast<std::int32_t>(f.grid.dim));
  for (int a = 0; a < 3; ++a) {
    write_raw(os, static_cast<std::int32_t>(f.grid.extents[a]));
  }
  for (int a = 0; a < 3; ++a) write_raw(os, f.grid.spacing[a]);
  for (int a = 0; a < 3; ++a) write_raw(os, f.grid.origin[a]);
  write_raw(os, static_cast<std::int32_t>(f.components));
  write_raw(os, static_cast<std::int32_t>(f.boundary));
  write_raw(os, static_cast<std::uint64_t>(f.grid.size()));
  os.write(reinterpret_cast<const char*>(f.grid.inside.data()),
           static_cast<std::streamsize>(f.grid.inside.size()));
  write_raw(os, static_cast<std::uint64_t>(f.values.size()));
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!os) throw ConfigError("write failure on '" + path + "'");
}

SampledField read_field_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open '" + path + "' for reading");
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kBinaryMagic, sizeof magic) != 0) {
    throw ConfigError("field binary: bad magic");
  }
  SampledField f;
  std::int32_t i32 = 0;
  read_raw(is, i32);
  f.grid.dim = i32;
  for (int a = 0; a < 3; ++a) {
    read_raw(is, i32);
    f.grid.extents[a] = i32;
  }
  for (int a = 0; a < 3; ++a) read_raw(is, f.grid.spacing[a]);
  for (int a = 0; a < 3; ++a) read_raw(is, f.grid.origin[a]);
  read_raw(is, i32);
  f.components = i32;
  read_raw(is, i32);
  f.boundary = static_cast<BoundaryConvention>(i32);
  std::uint64_t n = 0;
  read_raw(is, n);
  if (n != f.grid.size()) throw ConfigError("field binary: mask size mismatch");
  f.grid.inside.resize(n);
  is.read(reinterpret_cast<char*>(f.grid.inside.data()),
          static_cast<std::streamsize>(n));
  if (!is) throw ConfigError("field binary: truncated mask");
  read_raw(is, n);
  f.values.resize(n);
  is.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw ConfigError("field binary: truncated values");
  f.validate();
  return f;
}

}  // namespace orlicz
