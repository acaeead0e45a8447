#include "aslb/parallel.hpp"

#include <cstdlib>
#include <string>

namespace aslb {

int default_jobs() {
    const char* env = std::getenv("ASLB_JOBS");
    if (!env || !*env) return 1;
    try {
        const int v = std::stoi(env);
        return v > 0 ? v : 1;
    } catch (...) {
        return 1;
    }
}

}  // namespace aslb
