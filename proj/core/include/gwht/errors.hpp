#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace gwht {

// Bad shapes, overlapping axis sets, out-of-range parameters.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An enumeration or storage request exceeds the configured budget.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, double requested, double budget)
      : std::runtime_error(what + " (requested " + fmt(requested) + ", budget " + fmt(budget) + ")"),
        requested_(requested),
        budget_(budget) {}

  double requested() const { return requested_; }
  double budget() const { return budget_; }

 private:
  static std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  double requested_;
  double budget_;
};

// Protocol B encoder: P(y|x,f) has empty support for the drawn f.
class EncoderAbort : public std::runtime_error {
 public:
  EncoderAbort() : std::runtime_error("restricted encoder law has empty support") {}
};

}  // namespace gwht
