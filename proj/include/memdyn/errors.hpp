#ifndef MEMDYN_ERRORS_HPP_
#define MEMDYN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace memdyn
{

/// Invalid or incomplete configuration; the message names the offending key.
class ConfigError : public std::runtime_error
{
public:
  ConfigError(const std::string & key, const std::string & what)
  : std::runtime_error(what + " (key '" + key + "')"), key_(key) {}

  const std::string & key() const noexcept { return key_; }

private:
  std::string key_;
};

/// A series was truncated below the order needed for convergence.
class TruncationError : public std::runtime_error
{
public:
  TruncationError(int given, int required)
  : std::runtime_error(
      "Bessel series truncation M=" + std::to_string(given) + " below required M=" +
      std::to_string(required)),
    required_(required) {}

  int required() const noexcept { return required_; }

private:
  int required_;
};

/// Integration blew up, or a numerical procedure could not produce a result.
class NumericalError : public std::runtime_error
{
public:
  explicit NumericalError(const std::string & what, double time = -1.0)
  : std::runtime_error(what), time_(time) {}

  /// Simulation time of failure in seconds, negative when not applicable.
  double time() const noexcept { return time_; }

private:
  double time_;
};

}  // namespace memdyn

#endif  // MEMDYN_ERRORS_HPP_
