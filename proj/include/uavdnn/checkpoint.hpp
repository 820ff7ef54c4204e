#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uavdnn/nn.hpp"

namespace uavdnn {

// Text layout:
//   UAVDNN-CKPT v1
//   tensors <count>
//   then per tensor: "<name> <rows> <cols>" followed by <rows> lines of
//   <cols> values (row-major, %.17g).

inline constexpr const char* kCheckpointMagic = "UAVDNN-CKPT v1";

struct NamedTensor {
    std::string name;
    Matrix value;
};

std::string checkpoint_text(const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> parse_checkpoint(const std::string& text);
void write_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors);
std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path);

void append_mlp(std::vector<NamedTensor>& out, const std::string& prefix, const Mlp& net);
/// Copies tensors named prefix.W<i> / prefix.b<i> into `net`, checking shapes.
void load_mlp(const std::vector<NamedTensor>& in, const std::string& prefix, Mlp& net);

} // namespace uavdnn
