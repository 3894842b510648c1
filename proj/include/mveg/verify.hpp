#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace mveg {

// Runs one named property suite, or every suite for "all": oracle, norms,
// bullet, positivity, semiflow, lipschitz, dissipativity, masslaw. Each
// check prints one line with its count and worst margin. Returns true when
// everything passed; unknown suite names throw ConfigError.
bool run_verify(const std::string& suite, std::uint64_t seed, std::ostream& out);

}  // namespace mveg
