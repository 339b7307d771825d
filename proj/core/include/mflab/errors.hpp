#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mflab {

/// Two particles (or a particle and a kernel evaluation point) coincide.
/// Carries the offending pair so callers can report which particles collided.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(std::size_t i, std::size_t j, const std::string& what)
      : std::runtime_error(what), i_(i), j_(j) {}
  explicit SingularityError(const std::string& what)
      : std::runtime_error(what), i_(npos), j_(npos) {}

  std::size_t first() const { return i_; }
  std::size_t second() const { return j_; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t i_, j_;
};

/// A run-time failure during integration (collision floor hit, energy
/// monitor tripped, step control collapse). Distinct from parameter errors
/// so the CLI can map it to its own exit code.
class RuntimeAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mflab
