#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "vmc/rational.hpp"

namespace vmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRejected = 2;

/// Parses "inf", a plain integer, or an integer with a KiB/MiB/GiB/TiB suffix.
/// Suffixed values are converted to instance memory units, where one unit is
/// `mem_unit` (one of B, KiB, MiB, GiB, TiB). nullopt means unbounded.
/// Throws std::invalid_argument on malformed or non-integral values.
std::optional<std::int64_t> parse_mph(std::string_view text, std::string_view mem_unit = "B");

/// Parses "p/q" or a decimal such as "0.95" into an exact rational.
Rational parse_rational(std::string_view text);

/// Runs the command line; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace vmc::cli
