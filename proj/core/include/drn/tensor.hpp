#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "drn/error.hpp"

namespace drn {

enum class Dtype { f32, f64 };

inline const char* dtype_name(Dtype dt) {
  return dt == Dtype::f32 ? "f32" : "f64";
}

/// Dimensions of a rank-4 tensor in (batch, channel, row, col) order.
struct Shape {
  int64_t n = 0, c = 0, h = 0, w = 0;

  int64_t numel() const { return n * c * h * w; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

/// Dense rank-4 array, contiguous and row-major in (n, c, h, w) order.
/// The single carrier type for activations, gradients and parameters.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, Dtype dtype);

  static Tensor zeros(Shape shape, Dtype dtype) { return Tensor(shape, dtype); }
  static Tensor full(Shape shape, Dtype dtype, double value);

  const Shape& shape() const { return shape_; }
  Dtype dtype() const { return dtype_; }
  int64_t numel() const { return shape_.numel(); }
  bool empty() const { return shape_.numel() == 0; }

  template <typename T>
  std::span<T> view() {
    check_type<T>();
    auto& v = std::get<std::vector<T>>(data_);
    return {v.data(), v.size()};
  }

  template <typename T>
  std::span<const T> view() const {
    check_type<T>();
    const auto& v = std::get<std::vector<T>>(data_);
    return {v.data(), v.size()};
  }

  int64_t index(int64_t n, int64_t c, int64_t y, int64_t x) const {
    return ((n * shape_.c + c) * shape_.h + y) * shape_.w + x;
  }

  /// Element access as double regardless of dtype (test/diagnostic paths).
  double at(int64_t n, int64_t c, int64_t y, int64_t x) const;
  void set(int64_t n, int64_t c, int64_t y, int64_t x, double value);

  double max_abs() const;
  bool all_finite() const;

  /// Elementwise copy with dtype conversion (round to f32 or widen to f64).
  Tensor cast(Dtype target) const;

  bool bit_equal(const Tensor& other) const;

 private:
  template <typename T>
  void check_type() const {
    constexpr Dtype want =
        std::is_same_v<T, float> ? Dtype::f32 : Dtype::f64;
    if (want != dtype_)
      fail(ErrorCode::dtype_mismatch,
           std::string("tensor is ") + dtype_name(dtype_) + ", accessed as " +
               dtype_name(want));
  }

  Shape shape_{};
  Dtype dtype_ = Dtype::f32;
  std::variant<std::vector<float>, std::vector<double>> data_;
};

/// Throws unless both tensors share one dtype; returns it.
Dtype common_dtype(const Tensor& a, const Tensor& b, const char* op);

void check_same_shape(const Tensor& a, const Tensor& b, const char* op);

}  // namespace drn
