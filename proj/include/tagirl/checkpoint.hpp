// Binary checkpoint container for NetworkParameters.
//
// Layout (all integers and reals little-endian):
//   "TAGI1"                      5 bytes, magic + format version
//   u32 layer_count
//   per layer: u32 input_width, u32 output_width, u8 activation
//   per layer: f64 weight_means[out*in], f64 weight_variances[out*in],
//              f64 bias_means[out], f64 bias_variances[out]   (row-major)
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "tagirl/network.hpp"

namespace tagirl {

inline constexpr char kCheckpointMagic[] = "TAGI1";

class CheckpointError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_checkpoint(const NetworkParameters& params);
NetworkParameters decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const NetworkParameters& params,
                     const std::filesystem::path& path);
NetworkParameters load_checkpoint(const std::filesystem::path& path);

}  // namespace tagirl
