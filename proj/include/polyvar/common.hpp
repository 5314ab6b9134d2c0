#pragma once

#include <atomic>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace polyvar {

// Error taxonomy: argument misuse -> std::invalid_argument,
// resource caps -> ResourceError, bad numeric values -> EvaluationError,
// unsupported geometry -> UnsupportedDomainError.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedDomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::atomic<int>& thread_count_slot() {
    static std::atomic<int> n{1};
    return n;
}

inline void set_thread_count(int n) {
    thread_count_slot().store(n < 1 ? 1 : n);
}

inline int thread_count() { return thread_count_slot().load(); }

// Fixed-order pairwise reduction. The split point depends only on the index
// range, so the result is identical no matter how the inputs were produced.
inline double tree_sum(std::span<const double> x) {
    if (x.empty()) return 0.0;
    if (x.size() == 1) return x[0];
    if (x.size() == 2) return x[0] + x[1];
    const std::size_t mid = x.size() / 2;
    return tree_sum(x.first(mid)) + tree_sum(x.subspan(mid));
}

inline double tree_sum(const std::vector<double>& x) {
    return tree_sum(std::span<const double>(x));
}

// Evaluates f(i) for i in [0,n) into a vector, chunked over threads.
// Combined with tree_sum this gives scheduling-independent reductions.
inline std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& f) {
    std::vector<double> out(n, 0.0);
    const int threads = thread_count();
    if (threads <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        if (lo >= n) break;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) out[i] = f(i);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

// 17 significant digits round-trips IEEE doubles through text exactly.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

}  // namespace polyvar
