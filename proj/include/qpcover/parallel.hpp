#pragma once

#include <cstdlib>
#include <functional>
#include <future>
#include <string>
#include <vector>

namespace qpcover {

/// Worker count from QPCOVER_THREADS (default 1).  Parallelism only ever
/// changes speed: results are merged in input order.
inline int thread_count() {
    const char* env = std::getenv("QPCOVER_THREADS");
    if (!env) return 1;
    int n = std::atoi(env);
    return n >= 1 ? n : 1;
}

template <class T>
std::vector<T> parallel_map(int n, const std::function<T(int)>& f) {
    std::vector<T> out;
    out.reserve(n);
    int workers = thread_count();
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) out.push_back(f(i));
        return out;
    }
    std::vector<std::future<T>> futs;
    futs.reserve(n);
    for (int i = 0; i < n; ++i) futs.push_back(std::async(std::launch::async, f, i));
    for (auto& fu : futs) out.push_back(fu.get());
    return out;
}

} // namespace qpcover
