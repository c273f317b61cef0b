#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace privacycube {

// Specialize with `static constexpr std::array<std::string_view, N> names`
// listing wire names in declaration order. Enumerators must be 0..N-1.
template <class E>
struct EnumTraits;

template <class E>
constexpr std::size_t enum_count() {
  return EnumTraits<E>::names.size();
}

template <class E>
constexpr auto enum_values() {
  std::array<E, enum_count<E>()> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<E>(i);
  return out;
}

template <class E>
constexpr std::size_t enum_index(E e) {
  return static_cast<std::size_t>(e);
}

template <class E>
constexpr std::string_view to_string(E e) {
  return EnumTraits<E>::names[enum_index(e)];
}

template <class E>
constexpr std::optional<E> enum_from_string(std::string_view s) {
  const auto& names = EnumTraits<E>::names;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

}  // namespace privacycube
