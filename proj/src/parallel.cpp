#include "loopmc/parallel.hpp"

#include <cstdlib>
#include <string>

namespace loopmc {

unsigned worker_count(unsigned requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("LOOPMC_WORKERS")) {
        try {
            const auto n = std::stoul(env);
            if (n > 0)
                return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace loopmc
