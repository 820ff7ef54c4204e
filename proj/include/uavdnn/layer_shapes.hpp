#pragma once

#include <string>
#include <vector>

#include "uavdnn/scenario.hpp"

namespace uavdnn {

/// Coarse layer description used to derive synthetic layer profiles. A conv
/// layer may fold in a trailing max-pool; its output is the pooled tensor.
struct LayerShape {
    enum class Kind { Conv, Dense };
    Kind kind = Kind::Conv;
    int out_channels = 0; // conv: output channels; dense: output features
    int kernel = 1;
    int stride = 1;
    int padding = 0;
    int pool_kernel = 0;
    int pool_stride = 0;

    static LayerShape conv(int out, int k, int s, int p, int pool_k = 0, int pool_s = 0)
    {
        return {Kind::Conv, out, k, s, p, pool_k, pool_s};
    }
    static LayerShape dense(int out) { return {Kind::Dense, out, 1, 1, 0, 0, 0}; }
};

struct TensorShape {
    int channels = 0;
    int height = 1;
    int width = 1;

    long long elements() const { return 1LL * channels * height * width; }
};

/// Cost model: compute = 2 x multiply-accumulates (cycles), memory = fp32
/// weights + biases + output activations (bytes), output = fp32 activation
/// volume (bits).
DnnModelProfile profile_from_shapes(int kind, std::string name, TensorShape input,
                                    const std::vector<LayerShape>& layers);

DnnModelProfile yolov5_like_profile();
DnnModelProfile alexnet_profile();
DnnModelProfile vgg16_profile();
/// Hand-specified six-layer model with a memory footprint too large for a
/// single small follower; used by the tiny learning environment.
DnnModelProfile demo6_profile();

/// kind 1 = yolov5-like, 2 = alexnet, 3 = vgg16, 4 = demo6.
DnnModelProfile builtin_profile(int kind);
std::vector<DnnModelProfile> builtin_profiles();

} // namespace uavdnn
