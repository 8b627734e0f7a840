#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace sedfc {

inline unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Runs fn(lo, hi, partial) over a static chunking of [0, count) and merges
// the per-worker partials in worker order. Partial must be default
// constructible and provide merge(const Partial&). Results are independent
// of the worker count as long as Partial::merge is commutative and
// associative (the accumulators here are integer sums).
template <typename Partial, typename Fn>
Partial parallel_accumulate(std::uint64_t count, unsigned workers, Fn fn) {
    unsigned w = resolve_workers(workers);
    if (count < w) w = count > 0 ? static_cast<unsigned>(count) : 1;

    std::vector<Partial> partials(w);
    if (w == 1) {
        fn(std::uint64_t{0}, count, partials[0]);
        return partials[0];
    }

    std::vector<std::exception_ptr> errors(w);
    std::vector<std::thread> threads;
    const std::uint64_t chunk = count / w;
    const std::uint64_t rem = count % w;
    auto range_lo = [&](unsigned i) { return i * chunk + std::min<std::uint64_t>(i, rem); };

    for (unsigned i = 1; i < w; ++i) {
        threads.emplace_back([&, i] {
            try {
                fn(range_lo(i), range_lo(i + 1), partials[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
    }
    try {
        fn(range_lo(0), range_lo(1), partials[0]);
    } catch (...) {
        errors[0] = std::current_exception();
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (unsigned i = 1; i < w; ++i) partials[0].merge(partials[i]);
    return partials[0];
}

} // namespace sedfc
