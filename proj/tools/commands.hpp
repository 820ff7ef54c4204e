#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace uavdnn::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kValidation = 2,
    kGuard = 3,
    kIo = 4,
    kMismatch = 5,
    kInternal = 6,
};

/// `args` excludes the program name, e.g. {"plan", "--seeds", "3"}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

inline constexpr const char* kToolVersion = "1.0.0";

} // namespace uavdnn::cli
