#pragma once

#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace phiquad {

/// Raised when an iterative scheme exhausts its budget (CLI exit code 3).
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

inline int default_thread_count() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

/// Runs fn(i) for i in [0, count). Work items must be independent and write
/// disjoint state; callers that reduce results must do so afterwards in
/// ascending i so outputs stay bitwise-reproducible for any thread count.
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    int workers = std::min(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (int i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace phiquad
