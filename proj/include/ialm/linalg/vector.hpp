#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ialm/error.hpp"

namespace ialm {

// Dense real vector.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) { check_finite(); }
  explicit Vector(std::vector<double> values) : data_(std::move(values)) { check_finite(); }

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  Vector segment(std::size_t offset, std::size_t length) const {
    require(offset + length <= size(), ErrorKind::DimensionMismatch, "segment out of range");
    return Vector(std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(offset),
                                      data_.begin() + static_cast<std::ptrdiff_t>(offset + length)));
  }

  void set_segment(std::size_t offset, const Vector& v) {
    require(offset + v.size() <= size(), ErrorKind::DimensionMismatch, "segment out of range");
    std::copy(v.begin(), v.end(), data_.begin() + static_cast<std::ptrdiff_t>(offset));
  }

  double dot(const Vector& other) const {
    require(size() == other.size(), ErrorKind::DimensionMismatch, "dot: length mismatch");
    return std::inner_product(data_.begin(), data_.end(), other.data_.begin(), 0.0);
  }

  double norm() const {
    // Scaled accumulation keeps huge diverging iterates from overflowing.
    double scale = norm_inf();
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double sum = 0.0;
    for (double v : data_) sum += (v / scale) * (v / scale);
    return scale * std::sqrt(sum);
  }

  double norm_inf() const {
    double m = 0.0;
    for (double v : data_) {
      if (std::isnan(v)) return v;
      m = std::max(m, std::abs(v));
    }
    return m;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  Vector& operator+=(const Vector& o) {
    require(size() == o.size(), ErrorKind::DimensionMismatch, "vector +=");
    for (std::size_t i = 0; i < size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Vector& operator-=(const Vector& o) {
    require(size() == o.size(), ErrorKind::DimensionMismatch, "vector -=");
    for (std::size_t i = 0; i < size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Vector& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  // this += s * x
  void axpy(double s, const Vector& x) {
    require(size() == x.size(), ErrorKind::DimensionMismatch, "axpy");
    for (std::size_t i = 0; i < size(); ++i) data_[i] += s * x.data_[i];
  }

  static Vector concat(const Vector& a, const Vector& b) {
    std::vector<double> out(a.data_);
    out.insert(out.end(), b.data_.begin(), b.data_.end());
    return Vector(std::move(out));
  }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  void check_finite() const {
    require(all_finite(), ErrorKind::NonFinite, "vector entries must be finite");
  }

  std::vector<double> data_;
};

inline Vector operator+(Vector a, const Vector& b) { return a += b; }
inline Vector operator-(Vector a, const Vector& b) { return a -= b; }
inline Vector operator*(double s, Vector v) { return v *= s; }
inline Vector operator-(Vector v) { return v *= -1.0; }

inline double max_abs_diff(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), ErrorKind::DimensionMismatch, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace ialm
