#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <random>
#include <vector>

#include "ialm/error.hpp"
#include "ialm/linalg/matrix.hpp"
#include "ialm/linalg/vector.hpp"

namespace ialm {

// Permutation matrix P with P(i, image[i]) = 1, so (Px)_i = x_{image[i]}.
// Read as a sweep order, image lists the original indices in visiting order.
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
    std::vector<bool> seen(image_.size(), false);
    for (std::size_t v : image_) {
      require(v < image_.size() && !seen[v], ErrorKind::InvalidArgument,
              "permutation image must be a bijection");
      seen[v] = true;
    }
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::size_t> img(n);
    std::iota(img.begin(), img.end(), std::size_t{0});
    return Permutation(std::move(img));
  }

  // Uniform draw by Fisher–Yates.
  template <class Rng>
  static Permutation random(std::size_t n, Rng& rng) {
    std::vector<std::size_t> img(n);
    std::iota(img.begin(), img.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(img[i - 1], img[pick(rng)]);
    }
    return Permutation(std::move(img));
  }

  std::size_t order() const noexcept { return image_.size(); }
  std::size_t operator[](std::size_t i) const { return image_[i]; }
  const std::vector<std::size_t>& image() const noexcept { return image_; }
  bool is_identity() const {
    for (std::size_t i = 0; i < image_.size(); ++i)
      if (image_[i] != i) return false;
    return true;
  }

  Permutation inverse() const {
    std::vector<std::size_t> inv(image_.size());
    for (std::size_t i = 0; i < image_.size(); ++i) inv[image_[i]] = i;
    return Permutation(std::move(inv));
  }

  Matrix as_matrix() const {
    Matrix p(order(), order());
    for (std::size_t i = 0; i < order(); ++i) p(i, image_[i]) = 1.0;
    return p;
  }

  Vector apply(const Vector& x) const {
    require(x.size() == order(), ErrorKind::DimensionMismatch, "permutation apply: length");
    Vector y(x.size());
    for (std::size_t i = 0; i < order(); ++i) y[i] = x[image_[i]];
    return y;
  }

  // Steps to the lexicographically next ordering; false after the last one.
  bool advance() { return std::next_permutation(image_.begin(), image_.end()); }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> image_;
};

enum class PermuteSide { Rows, Cols, Similarity };

inline Matrix apply_permutation(const Permutation& p, const Matrix& b, PermuteSide side) {
  const bool rows = side != PermuteSide::Cols;
  const bool cols = side != PermuteSide::Rows;
  if (rows) require(p.order() == b.rows(), ErrorKind::DimensionMismatch, "permutation order vs rows");
  if (cols) require(p.order() == b.cols(), ErrorKind::DimensionMismatch, "permutation order vs cols");
  Matrix out(b.rows(), b.cols());
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      out(i, j) = b(rows ? p[i] : i, cols ? p[j] : j);
  return out;
}

}  // namespace ialm
