#include "itex/model_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace itex {

namespace {

constexpr std::array<char, 4> kMagic{'I', 'T', 'X', 'M'};
constexpr std::uint32_t kMaxDim = 1u << 28;

void put_u32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xffu), static_cast<char>((v >> 8) & 0xffu),
                              static_cast<char>((v >> 16) & 0xffu), static_cast<char>((v >> 24) & 0xffu)};
  out.write(b.data(), 4);
}

void put_f32(std::ostream& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw std::runtime_error("ITXM: truncated file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

float get_f32(std::istream& in) { return std::bit_cast<float>(get_u32(in)); }

std::vector<float> get_floats(std::istream& in, std::size_t n) {
  std::vector<float> v(n);
  for (float& f : v) {
    f = get_f32(in);
    if (!std::isfinite(f)) throw std::runtime_error("ITXM: non-finite value in payload");
  }
  return v;
}

void put_header(std::ostream& out, BackendTag tag, std::initializer_list<std::uint32_t> dims) {
  out.write(kMagic.data(), 4);
  put_u32(out, kItxmVersion);
  out.put(static_cast<char>(tag));
  put_u32(out, static_cast<std::uint32_t>(dims.size()));
  for (std::uint32_t d : dims) put_u32(out, d);
}

std::uint32_t u32(int v) {
  if (v < 0) throw std::invalid_argument("ITXM: negative dimension");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

BackendTag backend_of(const AnyModel& model) noexcept {
  switch (model.index()) {
    case 0: return BackendTag::kGaussian;
    case 1: return BackendTag::kPatchBank;
    default: return BackendTag::kLinear;
  }
}

std::string backend_name(BackendTag tag) {
  switch (tag) {
    case BackendTag::kGaussian: return "gaussian";
    case BackendTag::kPatchBank: return "patchbank";
    case BackendTag::kLinear: return "linear";
  }
  return "unknown";
}

BackendTag parse_backend(const std::string& name) {
  if (name == "gaussian") return BackendTag::kGaussian;
  if (name == "patchbank") return BackendTag::kPatchBank;
  if (name == "linear") return BackendTag::kLinear;
  throw std::invalid_argument("unknown backend '" + name + "' (expected gaussian, patchbank or linear)");
}

void write_model(std::ostream& out, const AnyModel& model) {
  if (const auto* gf = std::get_if<GaussianFieldModel>(&model)) {
    put_header(out, BackendTag::kGaussian, {u32(gf->height), u32(gf->width), u32(gf->channels)});
    for (double m : gf->means) put_f32(out, static_cast<float>(m));
    for (const auto& s : gf->spectra)
      for (double v : s) put_f32(out, static_cast<float>(v));
  } else if (const auto* bank = std::get_if<PatchBank>(&model)) {
    put_header(out, BackendTag::kPatchBank,
               {u32(bank->patch_size), u32(bank->stride), u32(bank->channels), u32(static_cast<int>(bank->count()))});
    for (float v : bank->patches) put_f32(out, v);
  } else {
    const auto& lin = std::get<LinearConvDenoiser>(model);
    put_header(out, BackendTag::kLinear, {u32(lin.kernel_size), u32(lin.channels), u32(lin.bins)});
    for (float v : lin.weights) put_f32(out, v);
    for (float v : lin.biases) put_f32(out, v);
  }
  if (!out) throw std::runtime_error("ITXM: write failed");
}

AnyModel read_model(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), 4) || magic != kMagic) throw std::runtime_error("ITXM: bad magic");
  const std::uint32_t version = get_u32(in);
  if (version != kItxmVersion) throw std::runtime_error("ITXM: unsupported version " + std::to_string(version));
  const int tag_byte = in.get();
  if (tag_byte == std::char_traits<char>::eof()) throw std::runtime_error("ITXM: truncated file");
  const std::uint32_t ndims = get_u32(in);
  if (ndims > 8) throw std::runtime_error("ITXM: implausible dimension count");
  std::vector<std::uint32_t> dims(ndims);
  for (auto& d : dims) {
    d = get_u32(in);
    if (d == 0 || d > kMaxDim) throw std::runtime_error("ITXM: invalid dimension");
  }
  auto expect_dims = [&](std::size_t n) {
    if (dims.size() != n) throw std::runtime_error("ITXM: wrong dimension count for backend");
  };

  AnyModel result;
  switch (static_cast<BackendTag>(tag_byte)) {
    case BackendTag::kGaussian: {
      expect_dims(3);
      GaussianFieldModel m;
      m.height = static_cast<int>(dims[0]);
      m.width = static_cast<int>(dims[1]);
      m.channels = static_cast<int>(dims[2]);
      if (m.channels != 1 && m.channels != 3) throw std::runtime_error("ITXM: bad channel count");
      for (float v : get_floats(in, static_cast<std::size_t>(m.channels))) m.means.push_back(v);
      for (int c = 0; c < m.channels; ++c) {
        const auto s = get_floats(in, static_cast<std::size_t>(m.height) * m.width);
        m.spectra.emplace_back(s.begin(), s.end());
      }
      result = std::move(m);
      break;
    }
    case BackendTag::kPatchBank: {
      expect_dims(4);
      PatchBank b;
      b.patch_size = static_cast<int>(dims[0]);
      b.stride = static_cast<int>(dims[1]);
      b.channels = static_cast<int>(dims[2]);
      if (b.channels != 1 && b.channels != 3) throw std::runtime_error("ITXM: bad channel count");
      b.patches = get_floats(in, static_cast<std::size_t>(dims[3]) * b.dim());
      b.refresh_norms();
      result = std::move(b);
      break;
    }
    case BackendTag::kLinear: {
      expect_dims(3);
      LinearConvDenoiser m;
      m.kernel_size = static_cast<int>(dims[0]);
      m.channels = static_cast<int>(dims[1]);
      m.bins = static_cast<int>(dims[2]);
      if (m.kernel_size % 2 == 0) throw std::runtime_error("ITXM: even kernel size");
      if (m.channels != 1 && m.channels != 3) throw std::runtime_error("ITXM: bad channel count");
      m.weights = get_floats(in, m.weights_per_bin() * m.bins);
      m.biases = get_floats(in, static_cast<std::size_t>(m.bins) * m.channels);
      result = std::move(m);
      break;
    }
    default:
      throw std::runtime_error("ITXM: unknown backend tag " + std::to_string(tag_byte));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw std::runtime_error("ITXM: trailing bytes after payload");
  return result;
}

void save_model(const std::string& path, const AnyModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_model(out, model);
}

AnyModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model '" + path + "'");
  return read_model(in);
}

}  // namespace itex
