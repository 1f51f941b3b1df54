#pragma once

#include <stdexcept>
#include <utility>
#include <variant>

namespace simflow {

// Minimal value-or-error carrier. T and E must be distinct types.
template <typename T, typename E>
class Result {
 public:
  Result(T value) : v_(std::in_place_index<0>, std::move(value)) {}
  Result(E error) : v_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  T& value() {
    if (!ok()) throw std::logic_error("Result::value() on error");
    return std::get<0>(v_);
  }
  const T& value() const {
    if (!ok()) throw std::logic_error("Result::value() on error");
    return std::get<0>(v_);
  }
  const E& error() const {
    if (ok()) throw std::logic_error("Result::error() on value");
    return std::get<1>(v_);
  }

  T& operator*() { return value(); }
  const T& operator*() const { return value(); }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

 private:
  std::variant<T, E> v_;
};

}  // namespace simflow
