#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "enn/network.hpp"

namespace enn {

// Binary model container, format version 1. All integers and floats are
// little-endian; doubles are IEEE-754 binary64.
//
//   magic   "ENN1" (4 bytes)
//   u32     format version (1)
//   u32     input_dim
//   u32     layer count
//   u64     init seed
//   per layer:
//     u32   width
//     u8    activation kind (0 dct, 1 relu, 2 fourier, 3 sine, 4 linear, 5 tanh)
//     dct:     u32 Q, u32 N
//     fourier: u32 Q, f64 period
//     sine:    f64 omega
//   payload, per layer:
//     W row-major (fan_in*width f64), b (width f64),
//     dct:     per neuron Q f64 coefficients + ceil(Q/8) mask bytes (LSB first)
//     fourier: per neuron Q f64 cos coefficients + Q f64 sin coefficients
//   u32     CRC-32 (IEEE) of the payload bytes
//
// Payload sizes are derivable from the header alone.

enum class ModelIoStatus {
  ok,
  io_error,
  bad_magic,
  version_mismatch,
  bad_header,
  truncated,
  checksum_mismatch,
};

class ModelIoError : public std::runtime_error {
 public:
  ModelIoError(ModelIoStatus code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ModelIoStatus code() const { return code_; }

 private:
  ModelIoStatus code_;
};

inline std::uint32_t crc32_ieee(const unsigned char* data, std::size_t len) {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1u) ? (0xEDB88320u ^ (c >> 1)) : (c >> 1);
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t c = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u64(out, bits);
}

struct ByteReader {
  const std::string& buf;
  std::size_t pos = 0;

  void need(std::size_t n, const char* what) const {
    if (pos + n > buf.size())
      throw ModelIoError(ModelIoStatus::truncated,
                         std::string("model file truncated reading ") + what);
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(buf[pos++]);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }
  double f64(const char* what) {
    const std::uint64_t bits = u64(what);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
};

}  // namespace detail

struct ModelLayerInfo {
  std::uint32_t width = 0;
  ActivationKind kind = ActivationKind::dct;
  std::uint32_t q = 0;
  std::uint32_t n = 0;
  double period = 2.0;
  double omega = 30.0;
};

struct ModelHeader {
  std::uint32_t version = 1;
  std::uint32_t input_dim = 0;
  std::uint64_t seed = 0;
  std::vector<ModelLayerInfo> layers;
};

inline std::size_t param_count(const ModelHeader& header) {
  std::size_t total = 0;
  std::size_t fan_in = header.input_dim;
  for (const ModelLayerInfo& layer : header.layers) {
    total += (fan_in + 1) * layer.width;
    if (layer.kind == ActivationKind::dct) total += static_cast<std::size_t>(layer.q) * layer.width;
    if (layer.kind == ActivationKind::fourier)
      total += 2 * static_cast<std::size_t>(layer.q) * layer.width;
    fan_in = layer.width;
  }
  return total;
}

inline void save_model(const Network& net, const std::string& path) {
  std::string header = "ENN1";
  detail::put_u32(header, 1);
  detail::put_u32(header, static_cast<std::uint32_t>(net.input_dim));
  detail::put_u32(header, static_cast<std::uint32_t>(net.layers.size()));
  detail::put_u64(header, net.seed);

  std::string payload;
  for (const Layer& layer : net.layers) {
    detail::put_u32(header, static_cast<std::uint32_t>(layer.b.size()));
    header.push_back(static_cast<char>(layer.kind));
    if (layer.kind == ActivationKind::dct) {
      detail::put_u32(header, static_cast<std::uint32_t>(layer.dct.front().q_count()));
      detail::put_u32(header, static_cast<std::uint32_t>(layer.dct.front().resolution));
    } else if (layer.kind == ActivationKind::fourier) {
      detail::put_u32(header, static_cast<std::uint32_t>(layer.fourier.front().q_count()));
      detail::put_f64(header, layer.fourier.front().period);
    } else if (layer.kind == ActivationKind::sine) {
      detail::put_f64(header, layer.omega);
    }

    for (double v : layer.w.data()) detail::put_f64(payload, v);
    for (double v : layer.b) detail::put_f64(payload, v);
    if (layer.kind == ActivationKind::dct) {
      for (const DctActivation& act : layer.dct) {
        for (double v : act.coeffs) detail::put_f64(payload, v);
        const std::size_t q = act.mask.size();
        for (std::size_t byte = 0; byte * 8 < q; ++byte) {
          std::uint8_t bits = 0;
          for (std::size_t bit = 0; bit < 8 && byte * 8 + bit < q; ++bit)
            if (act.mask[byte * 8 + bit]) bits |= static_cast<std::uint8_t>(1u << bit);
          payload.push_back(static_cast<char>(bits));
        }
      }
    } else if (layer.kind == ActivationKind::fourier) {
      for (const FourierActivation& act : layer.fourier) {
        for (double v : act.cos_coeffs) detail::put_f64(payload, v);
        for (double v : act.sin_coeffs) detail::put_f64(payload, v);
      }
    }
  }

  std::string trailer;
  detail::put_u32(trailer,
                  crc32_ieee(reinterpret_cast<const unsigned char*>(payload.data()),
                             payload.size()));

  // atomic replace: write a sibling temp file, then rename over the target
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ModelIoError(ModelIoStatus::io_error, "cannot open '" + tmp + "'");
    f.write(header.data(), static_cast<std::streamsize>(header.size()));
    f.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    f.write(trailer.data(), static_cast<std::streamsize>(trailer.size()));
    if (!f) throw ModelIoError(ModelIoStatus::io_error, "write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ModelIoError(ModelIoStatus::io_error, "rename failed for '" + path + "'");
}

namespace detail {

inline ModelHeader parse_header(ByteReader& r) {
  r.need(4, "magic");
  if (r.buf.compare(0, 4, "ENN1") != 0)
    throw ModelIoError(ModelIoStatus::bad_magic, "not a model file (bad magic)");
  r.pos = 4;
  ModelHeader h;
  h.version = r.u32("version");
  if (h.version != 1)
    throw ModelIoError(ModelIoStatus::version_mismatch,
                       "unsupported format version " + std::to_string(h.version));
  h.input_dim = r.u32("input_dim");
  const std::uint32_t n_layers = r.u32("layer count");
  if (h.input_dim == 0 || n_layers == 0)
    throw ModelIoError(ModelIoStatus::bad_header, "degenerate header dimensions");
  h.seed = r.u64("seed");
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    ModelLayerInfo info;
    info.width = r.u32("layer width");
    if (info.width == 0) throw ModelIoError(ModelIoStatus::bad_header, "zero-width layer");
    const std::uint8_t kind = r.u8("activation kind");
    if (kind > 5) throw ModelIoError(ModelIoStatus::bad_header, "unknown activation kind");
    info.kind = static_cast<ActivationKind>(kind);
    if (info.kind == ActivationKind::dct) {
      info.q = r.u32("q");
      info.n = r.u32("n");
      if (info.q == 0 || info.n < 2)
        throw ModelIoError(ModelIoStatus::bad_header, "bad dct parameters");
    } else if (info.kind == ActivationKind::fourier) {
      info.q = r.u32("q");
      info.period = r.f64("period");
      if (info.q == 0 || !(info.period > 0.0))
        throw ModelIoError(ModelIoStatus::bad_header, "bad fourier parameters");
    } else if (info.kind == ActivationKind::sine) {
      info.omega = r.f64("omega");
    }
    h.layers.push_back(info);
  }
  return h;
}

inline std::size_t payload_size(const ModelHeader& h) {
  std::size_t bytes = 0;
  std::size_t fan_in = h.input_dim;
  for (const ModelLayerInfo& layer : h.layers) {
    bytes += 8 * (fan_in * layer.width + layer.width);
    if (layer.kind == ActivationKind::dct)
      bytes += layer.width * (8 * static_cast<std::size_t>(layer.q) + (layer.q + 7) / 8);
    if (layer.kind == ActivationKind::fourier)
      bytes += layer.width * 16 * static_cast<std::size_t>(layer.q);
    fan_in = layer.width;
  }
  return bytes;
}

}  // namespace detail

// Header-only inspection (no payload read, no checksum verification).
inline ModelHeader read_model_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelIoError(ModelIoStatus::io_error, "cannot open '" + path + "'");
  std::string buf(4096, '\0');
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  buf.resize(static_cast<std::size_t>(in.gcount()));
  detail::ByteReader r{buf};
  return detail::parse_header(r);
}

inline Network load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelIoError(ModelIoStatus::io_error, "cannot open '" + path + "'");
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  detail::ByteReader r{buf};
  const ModelHeader header = detail::parse_header(r);
  const std::size_t body = detail::payload_size(header);
  r.need(body + 4, "payload");
  const std::uint32_t stored_crc = [&] {
    detail::ByteReader tr{buf};
    tr.pos = r.pos + body;
    return tr.u32("checksum");
  }();
  const std::uint32_t actual_crc =
      crc32_ieee(reinterpret_cast<const unsigned char*>(buf.data()) + r.pos, body);
  if (stored_crc != actual_crc)
    throw ModelIoError(ModelIoStatus::checksum_mismatch, "payload checksum mismatch");

  Network net;
  net.input_dim = static_cast<int>(header.input_dim);
  net.seed = header.seed;
  std::size_t fan_in = header.input_dim;
  for (const ModelLayerInfo& info : header.layers) {
    Layer layer;
    layer.kind = info.kind;
    layer.omega = info.omega;
    layer.w = Matrix(fan_in, info.width);
    for (double& v : layer.w.data()) v = r.f64("weights");
    layer.b.resize(info.width);
    for (double& v : layer.b) v = r.f64("biases");
    if (info.kind == ActivationKind::dct) {
      layer.dct.reserve(info.width);
      for (std::uint32_t m = 0; m < info.width; ++m) {
        DctActivation act = make_dct_activation(static_cast<int>(info.q),
                                                static_cast<int>(info.n));
        for (double& v : act.coeffs) v = r.f64("dct coefficients");
        for (std::size_t byte = 0; byte * 8 < act.mask.size(); ++byte) {
          const std::uint8_t bits = r.u8("mask");
          for (std::size_t bit = 0; bit < 8 && byte * 8 + bit < act.mask.size(); ++bit)
            act.mask[byte * 8 + bit] = (bits >> bit) & 1u;
        }
        layer.dct.push_back(std::move(act));
      }
    } else if (info.kind == ActivationKind::fourier) {
      layer.fourier.reserve(info.width);
      for (std::uint32_t m = 0; m < info.width; ++m) {
        FourierActivation act =
            make_fourier_activation(static_cast<int>(info.q), info.period);
        for (double& v : act.cos_coeffs) v = r.f64("fourier cos coefficients");
        for (double& v : act.sin_coeffs) v = r.f64("fourier sin coefficients");
        layer.fourier.push_back(std::move(act));
      }
    }
    fan_in = info.width;
    net.layers.push_back(std::move(layer));
  }
  return net;
}

}  // namespace enn
