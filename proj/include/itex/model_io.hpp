#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <variant>

#include "itex/gaussian_field.hpp"
#include "itex/linear_denoiser.hpp"
#include "itex/patch_bank.hpp"

namespace itex {

// ITXM model container, all integers little-endian:
//   char[4]  magic "ITXM"
//   u32      version (1)
//   u8       backend tag (1 gaussian, 2 patchbank, 3 linear)
//   u32      ndims, then u32 dims[ndims]
//   f32      payload, count implied by dims
//
// gaussian:  dims {height, width, channels}; payload means[C], spectra[C][H*W]
// patchbank: dims {patch_size, stride, channels, count}; payload patches[count][p*p*C]
// linear:    dims {kernel_size, channels, bins}; payload weights, biases

inline constexpr std::uint32_t kItxmVersion = 1;

enum class BackendTag : std::uint8_t { kGaussian = 1, kPatchBank = 2, kLinear = 3 };

using AnyModel = std::variant<GaussianFieldModel, PatchBank, LinearConvDenoiser>;

BackendTag backend_of(const AnyModel& model) noexcept;
std::string backend_name(BackendTag tag);
BackendTag parse_backend(const std::string& name);

void write_model(std::ostream& out, const AnyModel& model);
AnyModel read_model(std::istream& in);

void save_model(const std::string& path, const AnyModel& model);
AnyModel load_model(const std::string& path);

}  // namespace itex
