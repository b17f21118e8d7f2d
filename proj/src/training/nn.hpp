#pragma once

#include <span>
#include <vector>

#include "core/types.hpp"

namespace tide::training {

// 3x3 convolution, stride 1, zero padding 1. Weight layout is
// [out][ky][kx][in] so the innermost loop runs over contiguous input
// channels of the channel-last feature volumes.

core::FeatureVolume conv3x3_forward(const core::FeatureVolume& x,
                                    std::span<const double> w,
                                    std::span<const double> b, int out_c);

// Accumulates dX (returned), dW and dB for the given upstream gradient.
core::FeatureVolume conv3x3_backward(const core::FeatureVolume& x,
                                     std::span<const double> w,
                                     const core::FeatureVolume& dz,
                                     std::span<double> dw,
                                     std::span<double> db);

core::FeatureVolume relu_forward(const core::FeatureVolume& z);

// Gates dz by z > 0.
core::FeatureVolume relu_backward(const core::FeatureVolume& z,
                                  const core::FeatureVolume& da);

struct PoolResult {
  core::FeatureVolume out;
  std::vector<int> argmax;  // flat input index per output element
};

PoolResult maxpool2_forward(const core::FeatureVolume& x);

core::FeatureVolume maxpool2_backward(const core::FeatureVolume& x,
                                      const PoolResult& pooled,
                                      const core::FeatureVolume& dout);

std::vector<double> global_avg_pool(const core::FeatureVolume& f);

core::FeatureVolume image_as_volume(const core::Image& img);

}  // namespace tide::training
