#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "airbeam/channel.hpp"

namespace airbeam::io {

/// Plain-text problem instance:
///
///   N K
///   re im        (N*K lines, device-major: all antennas of device 1 first)
///   P <watts>    (optional)
///   sigma2 <watts>  (optional)
struct Instance {
  ComplexMatrix H;
  std::optional<double> power;
  std::optional<double> noise_variance;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

Instance read_instance(std::istream& in);
Instance read_instance_file(const std::string& path);

/// Writes shortest round-trip decimal representations, so reading the output
/// reproduces H bit for bit.
void write_instance(std::ostream& out, const Instance& instance);
void write_instance_file(const std::string& path, const Instance& instance);

}  // namespace airbeam::io
