#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "privacycube/core/enum_traits.hpp"

namespace privacycube::json_fields {

using nlohmann::json;

// Raised by the helpers below; callers translate into their own error type.
class FieldError : public std::runtime_error {
 public:
  enum class Kind { Missing, WrongType, UnknownEnumValue, BadValue };

  FieldError(Kind kind, std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), kind_(kind), path_(std::move(path)) {}

  Kind kind() const { return kind_; }
  const std::string& path() const { return path_; }

 private:
  Kind kind_;
  std::string path_;
};

inline std::string join(const std::string& parent, std::string_view key) {
  return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

inline std::string index(const std::string& parent, std::size_t i) {
  return parent + "[" + std::to_string(i) + "]";
}

inline const json& require(const json& obj, std::string_view key, const std::string& parent) {
  if (!obj.is_object()) {
    throw FieldError(FieldError::Kind::WrongType, parent.empty() ? "$" : parent,
                     "expected object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw FieldError(FieldError::Kind::Missing, join(parent, key), "missing field");
  }
  return *it;
}

inline const json* optional_field(const json& obj, std::string_view key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

inline std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw FieldError(FieldError::Kind::WrongType, path, "expected string");
  return v.get<std::string>();
}

inline double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw FieldError(FieldError::Kind::WrongType, path, "expected number");
  return v.get<double>();
}

inline long long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) {
    throw FieldError(FieldError::Kind::WrongType, path, "expected integer");
  }
  return v.get<long long>();
}

inline const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw FieldError(FieldError::Kind::WrongType, path, "expected array");
  return v;
}

inline const json& as_object(const json& v, const std::string& path) {
  if (!v.is_object()) throw FieldError(FieldError::Kind::WrongType, path, "expected object");
  return v;
}

template <class E>
E enum_named(std::string_view text, const std::string& path) {
  if (auto e = enum_from_string<E>(text)) return *e;
  throw FieldError(FieldError::Kind::UnknownEnumValue, path,
                   "unknown value \"" + std::string(text) + "\"");
}

template <class E>
E as_enum(const json& v, const std::string& path) {
  return enum_named<E>(as_string(v, path), path);
}

// Rejects duplicates so a set round-trips to the same array.
template <class E>
std::set<E> as_enum_set(const json& v, const std::string& path) {
  std::set<E> out;
  const auto& arr = as_array(v, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto p = index(path, i);
    if (!out.insert(as_enum<E>(arr[i], p)).second) {
      throw FieldError(FieldError::Kind::BadValue, p, "duplicate value");
    }
  }
  return out;
}

template <class E>
json enum_set_json(const std::set<E>& values) {
  json arr = json::array();
  for (E e : values) arr.push_back(std::string(to_string(e)));
  return arr;
}

}  // namespace privacycube::json_fields
