#pragma once

#include <stdexcept>
#include <string>

namespace scapm::cli {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

}  // namespace scapm::cli
