#include "beckmann/parallel.hpp"

#include <atomic>
#include <stdexcept>

namespace beckmann {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int threads)
{
    if (threads < 1)
        throw std::invalid_argument("thread count must be >= 1");
    g_threads.store(threads);
}

int thread_count() { return g_threads.load(); }

}  // namespace beckmann
