#include "drn/tensor.hpp"

#include <cmath>
#include <cstdio>

namespace drn {

std::string Shape::str() const {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "(%lld,%lld,%lld,%lld)",
                static_cast<long long>(n), static_cast<long long>(c),
                static_cast<long long>(h), static_cast<long long>(w));
  return buf;
}

Tensor::Tensor(Shape shape, Dtype dtype) : shape_(shape), dtype_(dtype) {
  if (shape.n < 1 || shape.c < 1 || shape.h < 1 || shape.w < 1)
    fail(ErrorCode::invalid_argument,
         "tensor dimensions must all be >= 1, got " + shape.str());
  if (dtype == Dtype::f32)
    data_ = std::vector<float>(static_cast<size_t>(shape.numel()), 0.0f);
  else
    data_ = std::vector<double>(static_cast<size_t>(shape.numel()), 0.0);
}

Tensor Tensor::full(Shape shape, Dtype dtype, double value) {
  Tensor t(shape, dtype);
  if (dtype == Dtype::f32) {
    for (auto& v : std::get<std::vector<float>>(t.data_))
      v = static_cast<float>(value);
  } else {
    for (auto& v : std::get<std::vector<double>>(t.data_)) v = value;
  }
  return t;
}

double Tensor::at(int64_t n, int64_t c, int64_t y, int64_t x) const {
  int64_t i = index(n, c, y, x);
  if (dtype_ == Dtype::f32) return std::get<std::vector<float>>(data_)[i];
  return std::get<std::vector<double>>(data_)[i];
}

void Tensor::set(int64_t n, int64_t c, int64_t y, int64_t x, double value) {
  int64_t i = index(n, c, y, x);
  if (dtype_ == Dtype::f32)
    std::get<std::vector<float>>(data_)[i] = static_cast<float>(value);
  else
    std::get<std::vector<double>>(data_)[i] = value;
}

double Tensor::max_abs() const {
  double m = 0.0;
  if (dtype_ == Dtype::f32) {
    for (float v : std::get<std::vector<float>>(data_))
      m = std::max(m, std::fabs(static_cast<double>(v)));
  } else {
    for (double v : std::get<std::vector<double>>(data_))
      m = std::max(m, std::fabs(v));
  }
  return m;
}

bool Tensor::all_finite() const {
  if (dtype_ == Dtype::f32) {
    for (float v : std::get<std::vector<float>>(data_))
      if (!std::isfinite(v)) return false;
  } else {
    for (double v : std::get<std::vector<double>>(data_))
      if (!std::isfinite(v)) return false;
  }
  return true;
}

Tensor Tensor::cast(Dtype target) const {
  if (target == dtype_) return *this;
  Tensor out(shape_, target);
  if (target == Dtype::f32) {
    auto src = view<double>();
    auto dst = out.view<float>();
    for (size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<float>(src[i]);
  } else {
    auto src = view<float>();
    auto dst = out.view<double>();
    for (size_t i = 0; i < src.size(); ++i) dst[i] = src[i];
  }
  return out;
}

bool Tensor::bit_equal(const Tensor& other) const {
  if (shape_ != other.shape_ || dtype_ != other.dtype_) return false;
  if (dtype_ == Dtype::f32) {
    auto a = view<float>(), b = other.view<float>();
    for (size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return false;
  } else {
    auto a = view<double>(), b = other.view<double>();
    for (size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return false;
  }
  return true;
}

Dtype common_dtype(const Tensor& a, const Tensor& b, const char* op) {
  if (a.dtype() != b.dtype())
    fail(ErrorCode::dtype_mismatch,
         std::string(op) + ": mixed dtypes " + dtype_name(a.dtype()) + " and " +
             dtype_name(b.dtype()));
  return a.dtype();
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!(a.shape() == b.shape()))
    fail(ErrorCode::shape_mismatch, std::string(op) + ": shapes " +
                                        a.shape().str() + " and " +
                                        b.shape().str() + " differ");
}

}  // namespace drn
