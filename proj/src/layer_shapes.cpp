#include "uavdnn/layer_shapes.hpp"

#include "uavdnn/error.hpp"

namespace uavdnn {

DnnModelProfile profile_from_shapes(int kind, std::string name, TensorShape input,
                                    const std::vector<LayerShape>& layers)
{
    DnnModelProfile model{kind, std::move(name), {}};
    TensorShape cur = input;
    int index = 1;
    for (const auto& layer : layers) {
        double macs = 0.0;
        double params = 0.0;
        TensorShape out;
        if (layer.kind == LayerShape::Kind::Conv) {
            out.channels = layer.out_channels;
            out.height = (cur.height + 2 * layer.padding - layer.kernel) / layer.stride + 1;
            out.width = (cur.width + 2 * layer.padding - layer.kernel) / layer.stride + 1;
            macs = static_cast<double>(out.elements()) * layer.kernel * layer.kernel * cur.channels;
            params = static_cast<double>(layer.kernel) * layer.kernel * cur.channels * layer.out_channels +
                     layer.out_channels;
            if (layer.pool_kernel > 0) {
                out.height = (out.height - layer.pool_kernel) / layer.pool_stride + 1;
                out.width = (out.width - layer.pool_kernel) / layer.pool_stride + 1;
            }
        } else {
            const auto in_features = static_cast<double>(cur.elements());
            out = {layer.out_channels, 1, 1};
            macs = in_features * layer.out_channels;
            params = in_features * layer.out_channels + layer.out_channels;
        }
        if (out.height <= 0 || out.width <= 0)
            throw ShapeError("layer " + std::to_string(index) + " of " + model.name +
                             " collapses the spatial extent");
        const auto out_elems = static_cast<double>(out.elements());
        model.layers.push_back({index, 2.0 * macs, 4.0 * (params + out_elems), 32.0 * out_elems});
        cur = out;
        ++index;
    }
    return model;
}

DnnModelProfile yolov5_like_profile()
{
    using L = LayerShape;
    return profile_from_shapes(1, "yolov5", {3, 640, 640},
                               {L::conv(32, 6, 2, 2), L::conv(64, 3, 2, 1), L::conv(64, 3, 1, 1),
                                L::conv(128, 3, 2, 1), L::conv(128, 3, 1, 1), L::conv(256, 3, 2, 1),
                                L::conv(256, 3, 1, 1), L::conv(512, 3, 2, 1), L::conv(512, 3, 1, 1),
                                L::conv(512, 1, 1, 0), L::conv(256, 1, 1, 0), L::conv(255, 1, 1, 0)});
}

DnnModelProfile alexnet_profile()
{
    using L = LayerShape;
    return profile_from_shapes(2, "alexnet", {3, 224, 224},
                               {L::conv(64, 11, 4, 2, 3, 2), L::conv(192, 5, 1, 2, 3, 2),
                                L::conv(384, 3, 1, 1), L::conv(256, 3, 1, 1), L::conv(256, 3, 1, 1, 3, 2),
                                L::dense(4096), L::dense(4096), L::dense(1000)});
}

DnnModelProfile vgg16_profile()
{
    using L = LayerShape;
    return profile_from_shapes(3, "vgg16", {3, 224, 224},
                               {L::conv(64, 3, 1, 1), L::conv(64, 3, 1, 1, 2, 2),
                                L::conv(128, 3, 1, 1), L::conv(128, 3, 1, 1, 2, 2),
                                L::conv(256, 3, 1, 1), L::conv(256, 3, 1, 1), L::conv(256, 3, 1, 1, 2, 2),
                                L::conv(512, 3, 1, 1), L::conv(512, 3, 1, 1), L::conv(512, 3, 1, 1, 2, 2),
                                L::conv(512, 3, 1, 1), L::conv(512, 3, 1, 1), L::conv(512, 3, 1, 1, 2, 2),
                                L::dense(4096), L::dense(4096), L::dense(1000)});
}

DnnModelProfile demo6_profile()
{
    return {4,
            "demo6",
            {{1, 3.0e9, 2.0e8, 4.0e7},
             {2, 2.4e9, 1.6e8, 2.0e7},
             {3, 1.8e9, 1.2e8, 4.0e6},
             {4, 1.2e9, 2.4e8, 8.0e6},
             {5, 0.6e9, 3.2e8, 1.0e6},
             {6, 0.3e9, 1.6e8, 8.0e4}}};
}

DnnModelProfile builtin_profile(int kind)
{
    switch (kind) {
    case 1: return yolov5_like_profile();
    case 2: return alexnet_profile();
    case 3: return vgg16_profile();
    case 4: return demo6_profile();
    default: throw ValidationError("no built-in layer profile for dnn kind " + std::to_string(kind));
    }
}

std::vector<DnnModelProfile> builtin_profiles()
{
    return {yolov5_like_profile(), alexnet_profile(), vgg16_profile(), demo6_profile()};
}

} // namespace uavdnn
