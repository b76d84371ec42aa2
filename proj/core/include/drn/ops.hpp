#pragma once

#include <utility>

#include "drn/tensor.hpp"

namespace drn {

/// Only the two layer geometries the network uses are supported:
/// 1x1 with no padding and 3x3 with one pixel of zero padding. Both keep
/// the spatial size unchanged at stride 1.
struct ConvSpec {
  int kh = 3;
  int kw = 3;
  int pad = 1;

  static ConvSpec k3() { return {3, 3, 1}; }
  static ConvSpec k1() { return {1, 1, 0}; }
};

void validate_conv_spec(const ConvSpec& spec);

/// out[n,o,y,x] = bias[o] + sum_{i,r,s} in[n,i,y+r-p,x+s-p] * w[o,i,r,s],
/// zero outside bounds. weight shape (c_out, c_in, kh, kw); bias shape
/// (1, c_out, 1, 1). Accumulates in double and rounds once, in a fixed
/// (i,r,s) order per output element, so results are bit-deterministic for
/// any thread count.
Tensor conv2d_forward(const Tensor& input, const Tensor& weight,
                      const Tensor& bias, const ConvSpec& spec);

struct ConvGrads {
  Tensor input;
  Tensor weight;
  Tensor bias;
};

/// Exact analytic adjoints of conv2d_forward.
ConvGrads conv2d_backward(const Tensor& grad_out, const Tensor& input,
                          const Tensor& weight, const ConvSpec& spec);

/// y = x for x > 0, alpha*(e^x - 1) otherwise.
Tensor elu_forward(const Tensor& x, double alpha);
Tensor elu_backward(const Tensor& grad_out, const Tensor& x, double alpha);

/// (n, c, h, w) -> (n, c/m^2, h*m, w*m);
/// out[n,o,y,x] = in[n, o*m^2 + (y%m)*m + (x%m), y/m, x/m].
/// pixel_unshuffle is the exact inverse; each is the other's backward pass.
Tensor pixel_shuffle(const Tensor& x, int m);
Tensor pixel_unshuffle(const Tensor& y, int m);

Tensor concat_channels(const Tensor& a, const Tensor& b);
std::pair<Tensor, Tensor> split_channels(const Tensor& x, int64_t c_first);

Tensor add(const Tensor& a, const Tensor& b);

/// In-place a += b (training-path convenience, same contract as add).
void add_inplace(Tensor& a, const Tensor& b);

/// The eight dihedral transforms: k = flip*4 + quarter_turns, with
/// quarter_turns clockwise rotations applied first and an optional
/// horizontal flip after. dihedral_inverse(dihedral_transform(x,k),k) == x.
Tensor dihedral_transform(const Tensor& x, int k);
Tensor dihedral_inverse(const Tensor& y, int k);

}  // namespace drn
