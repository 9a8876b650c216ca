#include "vemrcp/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <thread>
#include <vector>

namespace vemrcp {

int worker_count()
{
    if (const char* env = std::getenv("VEMRCP_THREADS")) {
        int value = 0;
        const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), value);
        if (ec == std::errc() && value > 0)
            return value;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body)
{
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end)
            break;
        threads.emplace_back([&, w, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i)
                    body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    threads.clear();
    // Lowest chunk wins so the reported failure does not depend on timing.
    for (const auto& error : errors)
        if (error)
            std::rethrow_exception(error);
}

}  // namespace vemrcp
