#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "finslerlab/error.hpp"
#include "finslerlab/taylor.hpp"

namespace finslerlab {

enum class Slot : bool { kLower = false, kUpper = true };

// Dense n^rank array with per-slot variance. Index order is the declaration
// order of the slots; e.g. a (1,2) tensor H^i_{jk} is stored as [i][j][k].
template <class T>
class BasicTensor {
 public:
  BasicTensor() = default;

  BasicTensor(int n, std::vector<Slot> slots, std::string tag = {}, bool symmetric = false)
      : n_(n), slots_(std::move(slots)), tag_(std::move(tag)), symmetric_(symmetric) {
    std::size_t size = 1;
    for (std::size_t s = 0; s < slots_.size(); ++s) size *= static_cast<std::size_t>(n_);
    data_.assign(size, T(0.0));
  }

  static BasicTensor lower(int n, int rank, std::string tag = {}, bool symmetric = false) {
    return BasicTensor(n, std::vector<Slot>(static_cast<std::size_t>(rank), Slot::kLower), std::move(tag), symmetric);
  }

  // One upper slot followed by `lower_rank` lower slots.
  static BasicTensor mixed(int n, int lower_rank, std::string tag = {}) {
    std::vector<Slot> s(static_cast<std::size_t>(lower_rank) + 1, Slot::kLower);
    s[0] = Slot::kUpper;
    return BasicTensor(n, std::move(s), std::move(tag));
  }

  int dim() const { return n_; }
  int rank() const { return static_cast<int>(slots_.size()); }
  const std::vector<Slot>& slots() const { return slots_; }
  const std::string& tag() const { return tag_; }
  void set_tag(std::string t) { tag_ = std::move(t); }
  bool symmetric() const { return symmetric_; }
  void set_symmetric(bool s) { symmetric_ = s; }
  std::size_t size() const { return data_.size(); }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  template <class... I>
  T& operator()(I... idx) {
    return data_[offset({static_cast<int>(idx)...})];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    return data_[offset({static_cast<int>(idx)...})];
  }

  std::size_t offset(std::initializer_list<int> idx) const {
    std::size_t off = 0;
    for (int i : idx) off = off * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    return off;
  }

  // Inverse of offset(): multi-index of a flat position.
  std::vector<int> unflatten(std::size_t flat) const {
    std::vector<int> idx(slots_.size());
    for (std::size_t s = slots_.size(); s-- > 0;) {
      idx[s] = static_cast<int>(flat % static_cast<std::size_t>(n_));
      flat /= static_cast<std::size_t>(n_);
    }
    return idx;
  }

  std::size_t flatten(const std::vector<int>& idx) const {
    std::size_t off = 0;
    for (int i : idx) off = off * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    return off;
  }

  BasicTensor& operator+=(const BasicTensor& o) {
    check_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] = data_[i] + o.data_[i];
    return *this;
  }
  BasicTensor& operator-=(const BasicTensor& o) {
    check_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] = data_[i] - o.data_[i];
    return *this;
  }
  friend BasicTensor operator+(BasicTensor a, const BasicTensor& b) { return a += b; }
  friend BasicTensor operator-(BasicTensor a, const BasicTensor& b) { return a -= b; }

  template <class S>
  BasicTensor scaled(const S& s) const {
    BasicTensor r = *this;
    for (auto& v : r.data_) v = v * s;
    return r;
  }

 private:
  void check_shape(const BasicTensor& o) const {
    if (o.n_ != n_ || o.slots_.size() != slots_.size()) throw Error("tensor: shape mismatch in " + tag_);
  }

  int n_ = 0;
  std::vector<Slot> slots_;
  std::string tag_;
  bool symmetric_ = false;
  std::vector<T> data_;
};

using Tensor = BasicTensor<double>;
using TensorField = BasicTensor<Taylor>;

// Values of a field at the expansion point.
inline Tensor evaluate(const TensorField& f) {
  Tensor t(f.dim(), f.slots(), f.tag(), f.symmetric());
  for (std::size_t i = 0; i < f.size(); ++i) t[i] = f[i].value();
  return t;
}

inline double max_abs(const Tensor& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.size() != b.size()) throw Error("tensor: size mismatch in comparison");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Largest deviation from total symmetry over all slot transpositions.
inline double symmetry_defect(const Tensor& t) {
  double m = 0.0;
  const int r = t.rank();
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    auto idx = t.unflatten(flat);
    for (int a = 0; a < r; ++a) {
      for (int b = a + 1; b < r; ++b) {
        auto swapped = idx;
        std::swap(swapped[static_cast<std::size_t>(a)], swapped[static_cast<std::size_t>(b)]);
        m = std::max(m, std::abs(t[flat] - t[t.flatten(swapped)]));
      }
    }
  }
  return m;
}

// Contract slot `slot` of t with the vector v.
template <class T, class V>
BasicTensor<T> contract(const BasicTensor<T>& t, int slot, const std::vector<V>& v) {
  std::vector<Slot> slots = t.slots();
  slots.erase(slots.begin() + slot);
  BasicTensor<T> r(t.dim(), slots, t.tag());
  for (std::size_t flat = 0; flat < t.size(); ++flat) {
    auto idx = t.unflatten(flat);
    int i = idx[static_cast<std::size_t>(slot)];
    idx.erase(idx.begin() + slot);
    r[r.flatten(idx)] = r[r.flatten(idx)] + t[flat] * v[static_cast<std::size_t>(i)];
  }
  return r;
}

}  // namespace finslerlab
