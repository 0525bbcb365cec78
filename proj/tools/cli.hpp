#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace advrisk::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageOrInput = 2;
inline constexpr int kNotCertified = 3;
inline constexpr int kVerifyMismatch = 4;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace advrisk::cli
