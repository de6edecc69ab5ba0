#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pdthreat/error.hpp"

namespace pdthreat {

using Vec = std::vector<double>;

template <class A, class B>
double dot(std::span<const A> a, std::span<const B> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return s;
}

inline double dot(const Vec& a, const Vec& b) {
  return dot(std::span<const double>(a), std::span<const double>(b));
}

template <class T>
double norm2(std::span<const T> a) {
  return std::sqrt(dot(a, a));
}

inline double norm2(const Vec& a) { return norm2(std::span<const double>(a)); }

template <class T>
double norm_inf(std::span<const T> a) {
  double m = 0.0;
  for (const auto v : a) m = std::max(m, std::abs(static_cast<double>(v)));
  return m;
}

template <class T>
Vec to_vec(std::span<T> a) {
  return Vec(a.begin(), a.end());
}

inline void check_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": expected dimension " + std::to_string(want) +
                    ", got " + std::to_string(got));
  }
}

}  // namespace pdthreat
