#include "training/nn.hpp"

#include <algorithm>

namespace tide::training {

core::FeatureVolume conv3x3_forward(const core::FeatureVolume& x,
                                    std::span<const double> w,
                                    std::span<const double> b, int out_c) {
  const int W = x.w, H = x.h, C = x.c;
  core::FeatureVolume z(W, H, out_c);
  for (int y = 0; y < H; ++y) {
    for (int xx = 0; xx < W; ++xx) {
      double* zp = z.cell(xx, y);
      for (int o = 0; o < out_c; ++o) zp[o] = b[static_cast<size_t>(o)];
      for (int ky = 0; ky < 3; ++ky) {
        const int sy = y + ky - 1;
        if (sy < 0 || sy >= H) continue;
        for (int kx = 0; kx < 3; ++kx) {
          const int sx = xx + kx - 1;
          if (sx < 0 || sx >= W) continue;
          const double* xp = x.cell(sx, sy);
          for (int o = 0; o < out_c; ++o) {
            const double* wp =
                w.data() + ((static_cast<size_t>(o) * 3 + ky) * 3 + kx) * C;
            double acc = 0.0;
            for (int l = 0; l < C; ++l) acc += wp[l] * xp[l];
            zp[o] += acc;
          }
        }
      }
    }
  }
  return z;
}

core::FeatureVolume conv3x3_backward(const core::FeatureVolume& x,
                                     std::span<const double> w,
                                     const core::FeatureVolume& dz,
                                     std::span<double> dw,
                                     std::span<double> db) {
  const int W = x.w, H = x.h, C = x.c, O = dz.c;
  core::FeatureVolume dx(W, H, C, 0.0);
  for (int y = 0; y < H; ++y) {
    for (int xx = 0; xx < W; ++xx) {
      const double* dzp = dz.cell(xx, y);
      for (int o = 0; o < O; ++o) db[static_cast<size_t>(o)] += dzp[o];
      for (int ky = 0; ky < 3; ++ky) {
        const int sy = y + ky - 1;
        if (sy < 0 || sy >= H) continue;
        for (int kx = 0; kx < 3; ++kx) {
          const int sx = xx + kx - 1;
          if (sx < 0 || sx >= W) continue;
          const double* xp = x.cell(sx, sy);
          double* dxp = dx.cell(sx, sy);
          for (int o = 0; o < O; ++o) {
            const double g = dzp[o];
            if (g == 0.0) continue;
            const size_t base = ((static_cast<size_t>(o) * 3 + ky) * 3 + kx) *
                                static_cast<size_t>(C);
            const double* wp = w.data() + base;
            double* dwp = dw.data() + base;
            for (int l = 0; l < C; ++l) {
              dwp[l] += g * xp[l];
              dxp[l] += g * wp[l];
            }
          }
        }
      }
    }
  }
  return dx;
}

core::FeatureVolume relu_forward(const core::FeatureVolume& z) {
  core::FeatureVolume a = z;
  for (double& v : a.v) v = std::max(0.0, v);
  return a;
}

core::FeatureVolume relu_backward(const core::FeatureVolume& z,
                                  const core::FeatureVolume& da) {
  core::FeatureVolume dz = da;
  for (size_t i = 0; i < dz.v.size(); ++i) {
    if (z.v[i] <= 0.0) dz.v[i] = 0.0;
  }
  return dz;
}

PoolResult maxpool2_forward(const core::FeatureVolume& x) {
  const int W = x.w / 2, H = x.h / 2, C = x.c;
  PoolResult r;
  r.out = core::FeatureVolume(W, H, C);
  r.argmax.assign(r.out.v.size(), 0);
  for (int y = 0; y < H; ++y) {
    for (int xx = 0; xx < W; ++xx) {
      for (int l = 0; l < C; ++l) {
        double best = -1e300;
        int best_idx = 0;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const int sx = 2 * xx + dx, sy = 2 * y + dy;
            const int idx =
                (sy * x.w + sx) * C + l;
            const double v = x.v[static_cast<size_t>(idx)];
            if (v > best) {
              best = v;
              best_idx = idx;
            }
          }
        }
        const size_t oi = (static_cast<size_t>(y) * W + xx) * C + l;
        r.out.v[oi] = best;
        r.argmax[oi] = best_idx;
      }
    }
  }
  return r;
}

core::FeatureVolume maxpool2_backward(const core::FeatureVolume& x,
                                      const PoolResult& pooled,
                                      const core::FeatureVolume& dout) {
  core::FeatureVolume dx(x.w, x.h, x.c, 0.0);
  for (size_t i = 0; i < dout.v.size(); ++i) {
    dx.v[static_cast<size_t>(pooled.argmax[i])] += dout.v[i];
  }
  return dx;
}

std::vector<double> global_avg_pool(const core::FeatureVolume& f) {
  std::vector<double> p(static_cast<size_t>(f.c), 0.0);
  for (int y = 0; y < f.h; ++y) {
    for (int x = 0; x < f.w; ++x) {
      const double* fp = f.cell(x, y);
      for (int l = 0; l < f.c; ++l) p[static_cast<size_t>(l)] += fp[l];
    }
  }
  const double inv = 1.0 / (static_cast<double>(f.w) * f.h);
  for (double& v : p) v *= inv;
  return p;
}

core::FeatureVolume image_as_volume(const core::Image& img) {
  core::FeatureVolume x(img.w, img.h, 3);
  x.v = img.v;
  return x;
}

}  // namespace tide::training
