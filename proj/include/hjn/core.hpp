#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjn {

inline constexpr const char* kVersion = "0.1.0";

struct Vec {
  double x = 0.0;
  double y = 0.0;

  double operator[](int i) const { return i == 0 ? x : y; }
  double& operator[](int i) { return i == 0 ? x : y; }
};

inline Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y}; }
inline Vec operator-(Vec a, Vec b) { return {a.x - b.x, a.y - b.y}; }
inline Vec operator-(Vec a) { return {-a.x, -a.y}; }
inline Vec operator*(double s, Vec a) { return {s * a.x, s * a.y}; }
inline Vec operator*(Vec a, double s) { return {s * a.x, s * a.y}; }
inline Vec operator/(Vec a, double s) { return {a.x / s, a.y / s}; }
inline bool operator==(Vec a, Vec b) { return a.x == b.x && a.y == b.y; }
inline double dot(Vec a, Vec b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec a) { return std::hypot(a.x, a.y); }
inline double norm2(Vec a) { return a.x * a.x + a.y * a.y; }
// tangent of a unit normal (zero in 1-D where n.y == 0 and n.x = ±1 is handled by callers)
inline Vec perp(Vec n) { return {-n.y, n.x}; }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class CflViolation : public NumericalError {
 public:
  CflViolation(double requested, double admissible)
      : NumericalError("CFL violation: dt=" + std::to_string(requested) +
                       " exceeds admissible dt=" + std::to_string(admissible)),
        admissible_dt(admissible) {}
  double admissible_dt;
};

class NotConverged : public NumericalError {
 public:
  NotConverged(const std::string& what, std::vector<double> history)
      : NumericalError(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

// how node loops run; serial is the reference the parallel path is tested against
enum class Exec { serial, parallel };

void set_threads(int n);

}  // namespace hjn
