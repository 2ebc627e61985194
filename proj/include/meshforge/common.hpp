#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace meshforge {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Parallelism cap for the few data-parallel verification loops.
// 0 or unset means "decide locally" (currently: run serial).
inline unsigned thread_cap() {
    const char* env = std::getenv("MESHFORGE_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    long v = std::strtol(env, nullptr, 10);
    return v > 0 ? static_cast<unsigned>(v) : 0;
}

}  // namespace meshforge
