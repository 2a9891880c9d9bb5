// Copyright 2026 The RCO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace rco {

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfRange : public Error {
 public:
  OutOfRange(std::string field, double value)
      : Error("out of range: " + field + " = " + std::to_string(value)),
        field_(std::move(field)),
        value_(value) {}

  const std::string& field() const { return field_; }
  double value() const { return value_; }

 private:
  std::string field_;
  double value_;
};

class DegenerateTarget : public Error {
 public:
  DegenerateTarget() : Error("target point coincides with ego position") {}
};

class InsufficientHistory : public Error {
 public:
  explicit InsufficientHistory(std::size_t got)
      : Error("history needs at least 2 snapshots, got " + std::to_string(got)) {}
};

class WrongStrategy : public Error {
 public:
  WrongStrategy() : Error("operation requires a stop_observe_move plan") {}
};

class ZeroTime : public Error {
 public:
  ZeroTime() : Error("game time must be positive") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised by every parser in the library when input text does not match the
/// expected schema. `where` is a JSON-pointer-like path or a byte offset.
class SchemaViolation : public Error {
 public:
  SchemaViolation(std::string where, const std::string& what)
      : Error("schema violation at " + where + ": " + what), where_(std::move(where)) {}

  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// ---------------------------------------------------------------------------
// Enum <-> snake_case string tables.
//
// Each enum used on a wire format specializes EnumNames with a constexpr
// array of (value, name) pairs. Parsing is strict: unknown names throw.

template <typename E>
struct EnumNames;

template <typename E>
constexpr std::string_view to_string(E value) {
  for (const auto& [v, name] : EnumNames<E>::kNames) {
    if (v == value) return name;
  }
  return "?";
}

template <typename E>
E enum_from_string(std::string_view name, std::string_view field = "enum") {
  for (const auto& [v, n] : EnumNames<E>::kNames) {
    if (n == name) return v;
  }
  throw SchemaViolation(std::string(field), "unknown token '" + std::string(name) + "'");
}

template <typename E>
constexpr auto all_values() {
  std::array<E, EnumNames<E>::kNames.size()> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = EnumNames<E>::kNames[i].first;
  return out;
}

// ---------------------------------------------------------------------------
// Small numeric / geometric helpers

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

inline double wrap_angle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

inline constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;

  double norm() const { return std::hypot(x, y); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// World frame: x forward along the initial route, y to the right, heading
/// measured clockwise from +x toward +y. A positive bearing is to the right,
/// which matches the steer convention (negative = left, positive = right).
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Expresses a world point in the ego frame: .x forward, .y to the right.
inline Vec2 to_local(const Pose& ego, Vec2 p) {
  const Vec2 d = p - ego.position();
  const double c = std::cos(ego.heading);
  const double s = std::sin(ego.heading);
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

/// Normalized image rectangle, [x0,x1] x [y0,y1] in image fractions.
struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  double cx() const { return 0.5 * (x0 + x1); }
  double cy() const { return 0.5 * (y0 + y1); }
  bool contains(const Rect& o) const {
    return o.x0 >= x0 && o.x1 <= x1 && o.y0 >= y0 && o.y1 <= y1;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

inline bool valid_rect(const Rect& r) {
  return r.x0 >= 0.0 && r.y0 >= 0.0 && r.x1 <= 1.0 && r.y1 <= 1.0 && r.x0 < r.x1 &&
         r.y0 < r.y1;
}

inline void require_valid_rect(const Rect& r, std::string_view field = "box") {
  if (!valid_rect(r)) {
    throw OutOfRange(std::string(field), r.area());
  }
}

// ---------------------------------------------------------------------------
// Deterministic RNG (splitmix64). Used wherever a seed must give identical
// results across standard libraries, so no <random> distributions.

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
};

}  // namespace rco
