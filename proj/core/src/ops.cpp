#include "drn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "drn/parallel.hpp"

namespace drn {

void validate_conv_spec(const ConvSpec& spec) {
  bool k1 = spec.kh == 1 && spec.kw == 1 && spec.pad == 0;
  bool k3 = spec.kh == 3 && spec.kw == 3 && spec.pad == 1;
  if (!k1 && !k3)
    fail(ErrorCode::invalid_argument,
         "unsupported conv spec: only 1x1/pad0 and 3x3/pad1 exist in this "
         "network");
}

namespace {

void check_conv_args(const Tensor& input, const Tensor& weight,
                     const Tensor& bias, const ConvSpec& spec) {
  validate_conv_spec(spec);
  common_dtype(input, weight, "conv2d");
  common_dtype(input, bias, "conv2d");
  const Shape& ws = weight.shape();
  if (ws.h != spec.kh || ws.w != spec.kw)
    fail(ErrorCode::shape_mismatch,
         "conv2d: kernel axes of weight " + ws.str() + " do not match spec " +
             std::to_string(spec.kh) + "x" + std::to_string(spec.kw));
  if (input.shape().c != ws.c)
    fail(ErrorCode::shape_mismatch,
         "conv2d: channel axis mismatch, input has " +
             std::to_string(input.shape().c) + " channels, weight expects " +
             std::to_string(ws.c));
  if (bias.shape().c != ws.n || bias.shape().n != 1 || bias.shape().h != 1 ||
      bias.shape().w != 1)
    fail(ErrorCode::shape_mismatch,
         "conv2d: bias shape " + bias.shape().str() + " must be (1," +
             std::to_string(ws.n) + ",1,1)");
}

template <typename T>
void conv2d_forward_impl(const Tensor& input, const Tensor& weight,
                         const Tensor& bias, const ConvSpec& spec,
                         Tensor& out) {
  const Shape in = input.shape();
  const int64_t c_out = weight.shape().n, c_in = in.c;
  const int64_t h = in.h, w = in.w, hw = h * w;
  const int p = spec.pad, kh = spec.kh, kw = spec.kw;
  auto x = input.view<T>();
  auto wt = weight.view<T>();
  auto bs = bias.view<T>();
  auto y = out.view<T>();

  const int64_t planes = in.n * c_out;
  const int nt = detail::threads_for(planes);
#pragma omp parallel for num_threads(nt) schedule(static) if (nt > 1)
  for (int64_t plane = 0; plane < planes; ++plane) {
    const int64_t n = plane / c_out, o = plane % c_out;
    std::vector<double> acc(static_cast<size_t>(hw), 0.0);
    for (int64_t i = 0; i < c_in; ++i) {
      const T* in_plane = x.data() + (n * c_in + i) * hw;
      const T* w_base = wt.data() + (o * c_in + i) * kh * kw;
      for (int r = 0; r < kh; ++r) {
        const int64_t y0 = std::max<int64_t>(0, p - r);
        const int64_t y1 = std::min<int64_t>(h, h + p - r);
        for (int s = 0; s < kw; ++s) {
          const double wv = static_cast<double>(w_base[r * kw + s]);
          const int64_t x0 = std::max<int64_t>(0, p - s);
          const int64_t x1 = std::min<int64_t>(w, w + p - s);
          for (int64_t yy = y0; yy < y1; ++yy) {
            const T* in_row = in_plane + (yy + r - p) * w + (s - p);
            double* acc_row = acc.data() + yy * w;
            for (int64_t xx = x0; xx < x1; ++xx)
              acc_row[xx] += wv * static_cast<double>(in_row[xx]);
          }
        }
      }
    }
    const double b = static_cast<double>(bs[o]);
    T* out_plane = y.data() + plane * hw;
    for (int64_t e = 0; e < hw; ++e)
      out_plane[e] = static_cast<T>(acc[e] + b);
  }
}

template <typename T>
void conv2d_backward_impl(const Tensor& grad_out, const Tensor& input,
                          const Tensor& weight, const ConvSpec& spec,
                          ConvGrads& grads) {
  const Shape in = input.shape();
  const int64_t c_out = weight.shape().n, c_in = in.c;
  const int64_t h = in.h, w = in.w, hw = h * w;
  const int p = spec.pad, kh = spec.kh, kw = spec.kw;
  auto go = grad_out.view<T>();
  auto x = input.view<T>();
  auto wt = weight.view<T>();
  auto gi = grads.input.view<T>();
  auto gw = grads.weight.view<T>();
  auto gb = grads.bias.view<T>();

  // grad_input[n,i,u,v] = sum_{o,r,s} grad_out[n,o,u-r+p,v-s+p] * w[o,i,r,s]
  const int64_t in_planes = in.n * c_in;
  const int nti = detail::threads_for(in_planes);
#pragma omp parallel for num_threads(nti) schedule(static) if (nti > 1)
  for (int64_t plane = 0; plane < in_planes; ++plane) {
    const int64_t n = plane / c_in, i = plane % c_in;
    std::vector<double> acc(static_cast<size_t>(hw), 0.0);
    for (int64_t o = 0; o < c_out; ++o) {
      const T* go_plane = go.data() + (n * c_out + o) * hw;
      const T* w_base = wt.data() + (o * c_in + i) * kh * kw;
      for (int r = 0; r < kh; ++r) {
        const int64_t u0 = std::max<int64_t>(0, r - p);
        const int64_t u1 = std::min<int64_t>(h, h + r - p);
        for (int s = 0; s < kw; ++s) {
          const double wv = static_cast<double>(w_base[r * kw + s]);
          const int64_t v0 = std::max<int64_t>(0, s - p);
          const int64_t v1 = std::min<int64_t>(w, w + s - p);
          for (int64_t u = u0; u < u1; ++u) {
            const T* go_row = go_plane + (u - r + p) * w + (p - s);
            double* acc_row = acc.data() + u * w;
            for (int64_t v = v0; v < v1; ++v)
              acc_row[v] += wv * static_cast<double>(go_row[v]);
          }
        }
      }
    }
    T* gi_plane = gi.data() + plane * hw;
    for (int64_t e = 0; e < hw; ++e) gi_plane[e] = static_cast<T>(acc[e]);
  }

  // grad_weight[o,i,r,s] = sum_{n,y,x} grad_out[n,o,y,x] * in[n,i,y+r-p,x+s-p]
  // Four partial sums combined in a fixed pattern keep the reduction both
  // vectorizable and bit-deterministic.
  const int64_t pairs = c_out * c_in;
  const int ntw = detail::threads_for(pairs);
#pragma omp parallel for num_threads(ntw) schedule(static) if (ntw > 1)
  for (int64_t pair = 0; pair < pairs; ++pair) {
    const int64_t o = pair / c_in, i = pair % c_in;
    for (int r = 0; r < kh; ++r) {
      const int64_t y0 = std::max<int64_t>(0, p - r);
      const int64_t y1 = std::min<int64_t>(h, h + p - r);
      for (int s = 0; s < kw; ++s) {
        const int64_t x0 = std::max<int64_t>(0, p - s);
        const int64_t x1 = std::min<int64_t>(w, w + p - s);
        double lanes[4] = {0.0, 0.0, 0.0, 0.0};
        for (int64_t n = 0; n < in.n; ++n) {
          const T* go_plane = go.data() + (n * c_out + o) * hw;
          const T* in_plane = x.data() + (n * c_in + i) * hw;
          for (int64_t yy = y0; yy < y1; ++yy) {
            const T* go_row = go_plane + yy * w;
            const T* in_row = in_plane + (yy + r - p) * w + (s - p);
            const int64_t len = x1 - x0;
            int64_t k = 0;
            for (; k + 4 <= len; k += 4) {
              lanes[0] += static_cast<double>(go_row[x0 + k]) *
                          static_cast<double>(in_row[x0 + k]);
              lanes[1] += static_cast<double>(go_row[x0 + k + 1]) *
                          static_cast<double>(in_row[x0 + k + 1]);
              lanes[2] += static_cast<double>(go_row[x0 + k + 2]) *
                          static_cast<double>(in_row[x0 + k + 2]);
              lanes[3] += static_cast<double>(go_row[x0 + k + 3]) *
                          static_cast<double>(in_row[x0 + k + 3]);
            }
            for (; k < len; ++k)
              lanes[k & 3] += static_cast<double>(go_row[x0 + k]) *
                              static_cast<double>(in_row[x0 + k]);
          }
        }
        gw[(pair * kh + r) * kw + s] =
            static_cast<T>((lanes[0] + lanes[1]) + (lanes[2] + lanes[3]));
      }
    }
  }

  // grad_bias[o] = sum_{n,y,x} grad_out[n,o,y,x]
  for (int64_t o = 0; o < c_out; ++o) {
    double lanes[4] = {0.0, 0.0, 0.0, 0.0};
    for (int64_t n = 0; n < in.n; ++n) {
      const T* go_plane = go.data() + (n * c_out + o) * hw;
      int64_t k = 0;
      for (; k + 4 <= hw; k += 4) {
        lanes[0] += static_cast<double>(go_plane[k]);
        lanes[1] += static_cast<double>(go_plane[k + 1]);
        lanes[2] += static_cast<double>(go_plane[k + 2]);
        lanes[3] += static_cast<double>(go_plane[k + 3]);
      }
      for (; k < hw; ++k) lanes[k & 3] += static_cast<double>(go_plane[k]);
    }
    gb[o] = static_cast<T>((lanes[0] + lanes[1]) + (lanes[2] + lanes[3]));
  }
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const Tensor& weight,
                      const Tensor& bias, const ConvSpec& spec) {
  check_conv_args(input, weight, bias, spec);
  const Shape in = input.shape();
  Tensor out({in.n, weight.shape().n, in.h, in.w}, input.dtype());
  if (input.dtype() == Dtype::f32)
    conv2d_forward_impl<float>(input, weight, bias, spec, out);
  else
    conv2d_forward_impl<double>(input, weight, bias, spec, out);
  return out;
}

ConvGrads conv2d_backward(const Tensor& grad_out, const Tensor& input,
                          const Tensor& weight, const ConvSpec& spec) {
  Tensor bias({1, weight.shape().n, 1, 1}, input.dtype());
  check_conv_args(input, weight, bias, spec);
  common_dtype(grad_out, input, "conv2d_backward");
  Shape want{input.shape().n, weight.shape().n, input.shape().h,
             input.shape().w};
  if (!(grad_out.shape() == want))
    fail(ErrorCode::shape_mismatch,
         "conv2d_backward: grad_out shape " + grad_out.shape().str() +
             " does not match forward output " + want.str());
  ConvGrads grads{Tensor(input.shape(), input.dtype()),
                  Tensor(weight.shape(), weight.dtype()),
                  Tensor({1, weight.shape().n, 1, 1}, input.dtype())};
  if (input.dtype() == Dtype::f32)
    conv2d_backward_impl<float>(grad_out, input, weight, spec, grads);
  else
    conv2d_backward_impl<double>(grad_out, input, weight, spec, grads);
  return grads;
}

namespace {
template <typename T>
void elu_fwd_impl(std::span<const T> x, std::span<T> y, double alpha) {
  for (size_t i = 0; i < x.size(); ++i) {
    double v = static_cast<double>(x[i]);
    y[i] = v > 0.0 ? x[i] : static_cast<T>(alpha * std::expm1(v));
  }
}
template <typename T>
void elu_bwd_impl(std::span<const T> g, std::span<const T> x, std::span<T> out,
                  double alpha) {
  for (size_t i = 0; i < x.size(); ++i) {
    double v = static_cast<double>(x[i]);
    double slope = v > 0.0 ? 1.0 : alpha * std::exp(v);
    out[i] = static_cast<T>(static_cast<double>(g[i]) * slope);
  }
}
}  // namespace

Tensor elu_forward(const Tensor& x, double alpha) {
  if (!(alpha > 0.0))
    fail(ErrorCode::invalid_argument, "elu: alpha must be > 0");
  Tensor y(x.shape(), x.dtype());
  if (x.dtype() == Dtype::f32)
    elu_fwd_impl<float>(x.view<float>(), y.view<float>(), alpha);
  else
    elu_fwd_impl<double>(x.view<double>(), y.view<double>(), alpha);
  return y;
}

Tensor elu_backward(const Tensor& grad_out, const Tensor& x, double alpha) {
  if (!(alpha > 0.0))
    fail(ErrorCode::invalid_argument, "elu: alpha must be > 0");
  common_dtype(grad_out, x, "elu_backward");
  check_same_shape(grad_out, x, "elu_backward");
  Tensor out(x.shape(), x.dtype());
  if (x.dtype() == Dtype::f32)
    elu_bwd_impl<float>(grad_out.view<float>(), x.view<float>(),
                        out.view<float>(), alpha);
  else
    elu_bwd_impl<double>(grad_out.view<double>(), x.view<double>(),
                         out.view<double>(), alpha);
  return out;
}

namespace {
template <typename T>
void shuffle_impl(const Tensor& x, Tensor& out, int m) {
  const Shape in = x.shape();
  const Shape os = out.shape();
  auto src = x.view<T>();
  auto dst = out.view<T>();
  for (int64_t n = 0; n < os.n; ++n)
    for (int64_t o = 0; o < os.c; ++o)
      for (int64_t y = 0; y < os.h; ++y) {
        const int64_t cy = o * m * m + (y % m) * m;
        const T* in_row =
            src.data() + ((n * in.c + cy) * in.h + y / m) * in.w;
        T* out_row = dst.data() + ((n * os.c + o) * os.h + y) * os.w;
        for (int64_t xx = 0; xx < os.w; ++xx)
          out_row[xx] = in_row[(xx % m) * in.h * in.w + xx / m];
      }
}
}  // namespace

Tensor pixel_shuffle(const Tensor& x, int m) {
  if (m < 1) fail(ErrorCode::invalid_argument, "pixel_shuffle: m must be >= 1");
  const Shape in = x.shape();
  if (in.c % (static_cast<int64_t>(m) * m) != 0)
    fail(ErrorCode::shape_mismatch,
         "pixel_shuffle: channel axis " + std::to_string(in.c) +
             " not divisible by m^2 = " + std::to_string(m * m));
  Tensor out({in.n, in.c / (m * m), in.h * m, in.w * m}, x.dtype());
  if (x.dtype() == Dtype::f32)
    shuffle_impl<float>(x, out, m);
  else
    shuffle_impl<double>(x, out, m);
  return out;
}

namespace {
template <typename T>
void unshuffle_impl(const Tensor& y, Tensor& out, int m) {
  const Shape in = y.shape();
  const Shape os = out.shape();
  auto src = y.view<T>();
  auto dst = out.view<T>();
  for (int64_t n = 0; n < in.n; ++n)
    for (int64_t o = 0; o < in.c; ++o)
      for (int64_t yy = 0; yy < in.h; ++yy) {
        const T* in_row = src.data() + ((n * in.c + o) * in.h + yy) * in.w;
        const int64_t c_base = o * m * m + (yy % m) * m;
        for (int64_t xx = 0; xx < in.w; ++xx) {
          const int64_t c = c_base + xx % m;
          dst[((n * os.c + c) * os.h + yy / m) * os.w + xx / m] = in_row[xx];
        }
      }
}
}  // namespace

Tensor pixel_unshuffle(const Tensor& y, int m) {
  if (m < 1)
    fail(ErrorCode::invalid_argument, "pixel_unshuffle: m must be >= 1");
  const Shape in = y.shape();
  if (in.h % m != 0 || in.w % m != 0)
    fail(ErrorCode::shape_mismatch,
         "pixel_unshuffle: spatial axes " + in.str() +
             " not divisible by m = " + std::to_string(m));
  Tensor out({in.n, in.c * m * m, in.h / m, in.w / m}, y.dtype());
  if (y.dtype() == Dtype::f32)
    unshuffle_impl<float>(y, out, m);
  else
    unshuffle_impl<double>(y, out, m);
  return out;
}

namespace {
template <typename T>
void concat_impl(const Tensor& a, const Tensor& b, Tensor& out) {
  auto pa = a.view<T>(), pb = b.view<T>();
  auto po = out.view<T>();
  const Shape sa = a.shape(), sb = b.shape();
  const int64_t hw = sa.h * sa.w;
  for (int64_t n = 0; n < sa.n; ++n) {
    std::copy_n(pa.data() + n * sa.c * hw, sa.c * hw,
                po.data() + n * (sa.c + sb.c) * hw);
    std::copy_n(pb.data() + n * sb.c * hw, sb.c * hw,
                po.data() + n * (sa.c + sb.c) * hw + sa.c * hw);
  }
}
}  // namespace

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  common_dtype(a, b, "concat_channels");
  const Shape sa = a.shape(), sb = b.shape();
  if (sa.n != sb.n || sa.h != sb.h || sa.w != sb.w)
    fail(ErrorCode::shape_mismatch,
         "concat_channels: batch/spatial axes of " + sa.str() + " and " +
             sb.str() + " differ");
  Tensor out({sa.n, sa.c + sb.c, sa.h, sa.w}, a.dtype());
  if (a.dtype() == Dtype::f32)
    concat_impl<float>(a, b, out);
  else
    concat_impl<double>(a, b, out);
  return out;
}

namespace {
template <typename T>
void split_impl(const Tensor& x, int64_t c_first, Tensor& a, Tensor& b) {
  auto px = x.view<T>();
  auto pa = a.view<T>();
  auto pb = b.view<T>();
  const Shape s = x.shape();
  const int64_t hw = s.h * s.w;
  for (int64_t n = 0; n < s.n; ++n) {
    std::copy_n(px.data() + n * s.c * hw, c_first * hw,
                pa.data() + n * c_first * hw);
    std::copy_n(px.data() + n * s.c * hw + c_first * hw,
                (s.c - c_first) * hw, pb.data() + n * (s.c - c_first) * hw);
  }
}
}  // namespace

std::pair<Tensor, Tensor> split_channels(const Tensor& x, int64_t c_first) {
  const Shape s = x.shape();
  if (c_first <= 0 || c_first >= s.c)
    fail(ErrorCode::invalid_argument,
         "split_channels: c_first must lie strictly inside the channel axis");
  Tensor a({s.n, c_first, s.h, s.w}, x.dtype());
  Tensor b({s.n, s.c - c_first, s.h, s.w}, x.dtype());
  if (x.dtype() == Dtype::f32)
    split_impl<float>(x, c_first, a, b);
  else
    split_impl<double>(x, c_first, a, b);
  return {std::move(a), std::move(b)};
}

Tensor add(const Tensor& a, const Tensor& b) {
  common_dtype(a, b, "add");
  check_same_shape(a, b, "add");
  Tensor out(a.shape(), a.dtype());
  if (a.dtype() == Dtype::f32) {
    auto pa = a.view<float>(), pb = b.view<float>();
    auto po = out.view<float>();
    for (size_t i = 0; i < pa.size(); ++i) po[i] = pa[i] + pb[i];
  } else {
    auto pa = a.view<double>(), pb = b.view<double>();
    auto po = out.view<double>();
    for (size_t i = 0; i < pa.size(); ++i) po[i] = pa[i] + pb[i];
  }
  return out;
}

void add_inplace(Tensor& a, const Tensor& b) {
  common_dtype(a, b, "add");
  check_same_shape(a, b, "add");
  if (a.dtype() == Dtype::f32) {
    auto pa = a.view<float>();
    auto pb = b.view<float>();
    for (size_t i = 0; i < pa.size(); ++i) pa[i] += pb[i];
  } else {
    auto pa = a.view<double>();
    auto pb = b.view<double>();
    for (size_t i = 0; i < pa.size(); ++i) pa[i] += pb[i];
  }
}

namespace {
template <typename T>
Tensor rot90_impl(const Tensor& x) {
  const Shape s = x.shape();
  Tensor out({s.n, s.c, s.w, s.h}, x.dtype());
  auto src = x.view<T>();
  auto dst = out.view<T>();
  for (int64_t n = 0; n < s.n; ++n)
    for (int64_t c = 0; c < s.c; ++c) {
      const T* ip = src.data() + (n * s.c + c) * s.h * s.w;
      T* op = dst.data() + (n * s.c + c) * s.h * s.w;
      for (int64_t y = 0; y < s.w; ++y)
        for (int64_t xx = 0; xx < s.h; ++xx)
          op[y * s.h + xx] = ip[(s.h - 1 - xx) * s.w + y];
    }
  return out;
}

template <typename T>
Tensor hflip_impl(const Tensor& x) {
  const Shape s = x.shape();
  Tensor out(s, x.dtype());
  auto src = x.view<T>();
  auto dst = out.view<T>();
  for (int64_t p = 0; p < s.n * s.c * s.h; ++p) {
    const T* ip = src.data() + p * s.w;
    T* op = dst.data() + p * s.w;
    for (int64_t xx = 0; xx < s.w; ++xx) op[xx] = ip[s.w - 1 - xx];
  }
  return out;
}

Tensor rot90_cw(const Tensor& x) {
  return x.dtype() == Dtype::f32 ? rot90_impl<float>(x) : rot90_impl<double>(x);
}
Tensor hflip(const Tensor& x) {
  return x.dtype() == Dtype::f32 ? hflip_impl<float>(x) : hflip_impl<double>(x);
}
}  // namespace

Tensor dihedral_transform(const Tensor& x, int k) {
  if (k < 0 || k > 7)
    fail(ErrorCode::invalid_argument, "dihedral: k must be in [0,8)");
  Tensor t = x;
  for (int i = 0; i < (k & 3); ++i) t = rot90_cw(t);
  if (k & 4) t = hflip(t);
  return t;
}

Tensor dihedral_inverse(const Tensor& y, int k) {
  if (k < 0 || k > 7)
    fail(ErrorCode::invalid_argument, "dihedral: k must be in [0,8)");
  Tensor t = y;
  if (k & 4) t = hflip(t);
  for (int i = 0; i < (4 - (k & 3)) % 4; ++i) t = rot90_cw(t);
  return t;
}

}  // namespace drn
