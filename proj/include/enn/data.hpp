#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "enn/linalg.hpp"
#include "enn/rng.hpp"

namespace enn {

// Supervised sample set. inputs is D x M0 with entries in [-1,1]; targets
// hold -1/+1 labels for classification or amplitudes in [-1,1] for
// regression.
struct Dataset {
  Matrix inputs;
  Vector targets;

  std::size_t size() const { return targets.size(); }
  std::size_t input_dim() const { return inputs.cols(); }
};

enum class ProblemId { p1, p2, p3, p4, p5 };

// Synthetic 2-D binary classification maps. The geometries are stand-ins
// spanning smooth, oscillatory, and fine-grained boundaries; every shape
// parameter is adjustable.
struct ProblemSpec {
  ProblemId id = ProblemId::p1;
  double ring_inner = 0.35;      // p1: annulus radii
  double ring_outer = 0.75;
  double wave_amplitude = 0.4;   // p2: x2 > A * sin(2*pi*cycles*x1)
  double wave_cycles = 1.0;
  double spiral_turns = 1.5;     // p3: total twist from center to corner radius
  int checker_cells = 3;         // p5: cells per axis

  int label(double x1, double x2) const {
    switch (id) {
      case ProblemId::p1: {
        const double r = std::hypot(x1, x2);
        return (r >= ring_inner && r <= ring_outer) ? 1 : -1;
      }
      case ProblemId::p2:
        return x2 > wave_amplitude * std::sin(2.0 * std::numbers::pi * wave_cycles * x1)
                   ? 1
                   : -1;
      case ProblemId::p3: {
        // two interleaved Archimedean arms: band phase advances with radius
        const double r = std::hypot(x1, x2);
        const double phi = std::atan2(x2, x1);
        const double twist = 2.0 * std::numbers::pi * spiral_turns / std::numbers::sqrt2;
        return std::sin(phi - twist * r) >= 0.0 ? 1 : -1;
      }
      case ProblemId::p4:
        return x1 * x2 >= 0.0 ? 1 : -1;
      case ProblemId::p5: {
        const auto cell = [this](double v) {
          int c = static_cast<int>(std::floor((v + 1.0) * 0.5 * checker_cells));
          if (c < 0) c = 0;
          if (c >= checker_cells) c = checker_cells - 1;
          return c;
        };
        return (cell(x1) + cell(x2)) % 2 == 0 ? 1 : -1;
      }
    }
    throw std::invalid_argument("problem label: unknown id");
  }
};

inline ProblemSpec problem_from_id(ProblemId id) {
  ProblemSpec spec;
  spec.id = id;
  return spec;
}

inline ProblemSpec parse_problem(const std::string& name) {
  if (name == "P1" || name == "p1") return problem_from_id(ProblemId::p1);
  if (name == "P2" || name == "p2") return problem_from_id(ProblemId::p2);
  if (name == "P3" || name == "p3") return problem_from_id(ProblemId::p3);
  if (name == "P4" || name == "p4") return problem_from_id(ProblemId::p4);
  if (name == "P5" || name == "p5") return problem_from_id(ProblemId::p5);
  throw std::invalid_argument("unknown problem id: " + name);
}

// n i.i.d. points uniform over [-1,1]^2 labeled by the spec. Per sample the
// draw order is x1 then x2.
inline Dataset generate_problem(const ProblemSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("generate_problem: n must be >= 1");
  Dataset data;
  data.inputs = Matrix(n, 2);
  data.targets.resize(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = rng.uniform(-1.0, 1.0);
    const double x2 = rng.uniform(-1.0, 1.0);
    data.inputs(i, 0) = x1;
    data.inputs(i, 1) = x2;
    data.targets[i] = static_cast<double>(spec.label(x1, x2));
  }
  return data;
}

// Grayscale raster with amplitudes in [-1,1], row 0 at the top.
struct ImageGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  Vector pixels;  // row-major, height*width

  double at(std::size_t r, std::size_t c) const { return pixels[r * width + c]; }
  double& at(std::size_t r, std::size_t c) { return pixels[r * width + c]; }
};

// One sample per pixel, row-major. Pixel centers map to
// x1 = 2*(col+0.5)/W - 1 and x2 = 1 - 2*(row+0.5)/H, so the top row sits at
// x2 near +1 and the raster orientation matches decision maps.
inline Dataset image_to_dataset(const ImageGrid& img) {
  if (img.height == 0 || img.width == 0 || img.pixels.size() != img.height * img.width)
    throw std::invalid_argument("image_to_dataset: empty or inconsistent image");
  Dataset data;
  data.inputs = Matrix(img.pixels.size(), 2);
  data.targets.resize(img.pixels.size());
  std::size_t i = 0;
  for (std::size_t r = 0; r < img.height; ++r) {
    const double x2 = 1.0 - 2.0 * (static_cast<double>(r) + 0.5) / static_cast<double>(img.height);
    for (std::size_t c = 0; c < img.width; ++c, ++i) {
      data.inputs(i, 0) =
          2.0 * (static_cast<double>(c) + 0.5) / static_cast<double>(img.width) - 1.0;
      data.inputs(i, 1) = x2;
      data.targets[i] = img.at(r, c);
    }
  }
  return data;
}

// Inverse of image_to_dataset at native resolution: reshapes the targets
// back into the raster (sample order is defined by image_to_dataset).
inline ImageGrid dataset_to_image(const Dataset& data, std::size_t height, std::size_t width) {
  if (data.size() != height * width)
    throw std::invalid_argument("dataset_to_image: sample count does not match resolution");
  ImageGrid img;
  img.height = height;
  img.width = width;
  img.pixels = data.targets;
  return img;
}

// ---------------------------------------------------------------------------
// PGM files (binary P5 and ASCII P2, maxval 255). Gray value v maps to
// amplitude 2*v/255 - 1; saving inverts with round-half-up.

struct PgmError : std::runtime_error {
  std::size_t offset;
  PgmError(const std::string& what, std::size_t off)
      : std::runtime_error(what + " (byte offset " + std::to_string(off) + ")"),
        offset(off) {}
};

namespace detail {

struct PgmCursor {
  const std::string& buf;
  std::size_t pos = 0;

  bool eof() const { return pos >= buf.size(); }

  // skips whitespace and '#' comments running to end of line
  void skip_separators() {
    while (!eof()) {
      const char ch = buf[pos];
      if (ch == '#') {
        while (!eof() && buf[pos] != '\n') ++pos;
      } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
        ++pos;
      } else {
        break;
      }
    }
  }

  long read_int(const char* what) {
    skip_separators();
    if (eof()) throw PgmError(std::string("unexpected end of file reading ") + what, pos);
    if (buf[pos] < '0' || buf[pos] > '9')
      throw PgmError(std::string("expected digit for ") + what, pos);
    long value = 0;
    while (!eof() && buf[pos] >= '0' && buf[pos] <= '9') {
      value = value * 10 + (buf[pos] - '0');
      if (value > 1000000000L) throw PgmError(std::string(what) + " out of range", pos);
      ++pos;
    }
    return value;
  }
};

}  // namespace detail

inline ImageGrid load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PgmError("cannot open '" + path + "'", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string buf = ss.str();

  detail::PgmCursor cur{buf};
  if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != '2' && buf[1] != '5'))
    throw PgmError("bad magic, expected P2 or P5", 0);
  const bool binary = buf[1] == '5';
  cur.pos = 2;

  const long width = cur.read_int("width");
  const long height = cur.read_int("height");
  const long maxval = cur.read_int("maxval");
  if (width < 1 || height < 1) throw PgmError("nonpositive dimensions", cur.pos);
  if (maxval != 255) throw PgmError("unsupported maxval, expected 255", cur.pos);

  ImageGrid img;
  img.width = static_cast<std::size_t>(width);
  img.height = static_cast<std::size_t>(height);
  img.pixels.resize(img.width * img.height);

  if (binary) {
    // exactly one whitespace byte after maxval, then raw pixels
    if (cur.eof()) throw PgmError("truncated after maxval", cur.pos);
    const char sep = buf[cur.pos];
    if (sep != ' ' && sep != '\t' && sep != '\r' && sep != '\n')
      throw PgmError("expected single whitespace before binary payload", cur.pos);
    ++cur.pos;
    if (buf.size() - cur.pos < img.pixels.size())
      throw PgmError("truncated pixel payload", buf.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      const unsigned char v = static_cast<unsigned char>(buf[cur.pos + i]);
      img.pixels[i] = 2.0 * static_cast<double>(v) / 255.0 - 1.0;
    }
  } else {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      const long v = cur.read_int("pixel");
      if (v > 255) throw PgmError("pixel value above maxval", cur.pos);
      img.pixels[i] = 2.0 * static_cast<double>(v) / 255.0 - 1.0;
    }
  }
  return img;
}

inline void save_pgm(const ImageGrid& img, const std::string& path) {
  if (img.height == 0 || img.width == 0 || img.pixels.size() != img.height * img.width)
    throw std::invalid_argument("save_pgm: empty or inconsistent image");
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                    "\n255\n";
  out.reserve(out.size() + img.pixels.size());
  for (double a : img.pixels) {
    double v = std::floor((a + 1.0) * 255.0 / 2.0 + 0.5);  // round half up
    if (v < 0.0) v = 0.0;
    if (v > 255.0) v = 255.0;
    out.push_back(static_cast<char>(static_cast<unsigned char>(v)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("save_pgm: cannot open '" + path + "'");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error("save_pgm: write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// Dataset CSV: header x1,...,xM,y then one sample per line, 17 significant
// digits so values round-trip exactly.

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("write_dataset_csv: cannot open '" + path + "'");
  for (std::size_t j = 0; j < data.input_dim(); ++j) f << "x" << (j + 1) << ",";
  f << "y\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.input_dim(); ++j)
      f << format_g17(data.inputs(i, j)) << ",";
    f << format_g17(data.targets[i]) << "\n";
  }
  if (!f) throw std::runtime_error("write_dataset_csv: write failed for '" + path + "'");
}

inline Dataset read_dataset_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_dataset_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("read_dataset_csv: empty file");
  std::size_t dims = 0;
  for (char c : line)
    if (c == ',') ++dims;
  if (dims == 0) throw std::runtime_error("read_dataset_csv: malformed header");

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(ss, cell, ',')) {
      values.push_back(std::stod(cell));
      ++count;
    }
    if (count != dims + 1)
      throw std::runtime_error("read_dataset_csv: wrong column count on row " +
                               std::to_string(rows + 1));
    ++rows;
  }
  Dataset data;
  data.inputs = Matrix(rows, dims);
  data.targets.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < dims; ++j) data.inputs(i, j) = values[i * (dims + 1) + j];
    data.targets[i] = values[i * (dims + 1) + dims];
  }
  return data;
}

// ---------------------------------------------------------------------------
// Procedural grayscale test scene: smooth gradients plus hard edges and
// periodic texture, used as the stand-in for natural-image regression runs.

inline ImageGrid make_synthetic_scene(std::size_t size) {
  if (size < 8) throw std::invalid_argument("make_synthetic_scene: size must be >= 8");
  ImageGrid img;
  img.height = size;
  img.width = size;
  img.pixels.resize(size * size);
  for (std::size_t r = 0; r < size; ++r) {
    const double v = (static_cast<double>(r) + 0.5) / static_cast<double>(size);
    for (std::size_t c = 0; c < size; ++c) {
      const double u = (static_cast<double>(c) + 0.5) / static_cast<double>(size);
      // sky gradient
      double g = 0.75 - 0.55 * v;
      // sun disc with a soft rim
      const double dsun = std::hypot(u - 0.72, v - 0.22);
      g += 0.45 * (1.0 - std::tanh(50.0 * (dsun - 0.13))) * 0.5;
      // building silhouette with a window grid
      if (u > 0.12 && u < 0.38 && v > 0.28 && v < 0.62) {
        g = -0.45;
        const bool wu = std::fmod(u, 0.065) < 0.03;
        const bool wv = std::fmod(v, 0.085) < 0.04;
        if (wu && wv) g = 0.35;
      }
      // ground below a hard horizon, with diagonal texture
      if (v >= 0.62) {
        g = -0.15 + 0.25 * std::sin(2.0 * std::numbers::pi * (6.0 * u + 3.0 * v));
        g -= 0.5 * (v - 0.62);
      }
      if (g > 1.0) g = 1.0;
      if (g < -1.0) g = -1.0;
      img.at(r, c) = g;
    }
  }
  return img;
}

}  // namespace enn
