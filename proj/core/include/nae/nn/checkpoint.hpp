#pragma once

#include <string>
#include <vector>

#include "nae/nn/unet.hpp"

namespace nae {

/// Weight serialization: magic "NAEW", u32 LE version, u64 LE config digest,
/// u32 parameter count, then per parameter: u32 name length + name, u32 rank
/// (always 4) + dims, f32 LE payload. The architecture is reconstructed from
/// the parameter names and shapes and re-verified against the stored digest.
std::vector<unsigned char> write_checkpoint(const UNet& net);
UNet read_checkpoint(const std::vector<unsigned char>& bytes, const std::string& source);

void save_checkpoint_file(const UNet& net, const std::string& path);
UNet load_checkpoint_file(const std::string& path);

}  // namespace nae
