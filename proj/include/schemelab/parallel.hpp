#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace schemelab {

/// Splits [0,total) into at most `jobs` contiguous chunks, evaluates
/// `chunk(begin,end) -> R` on worker threads and folds the partial results in
/// chunk order with `merge(acc, part)`. Chunk boundaries depend only on
/// (total, jobs); with an order-insensitive merge the result is independent of
/// the partitioning.
template <class R, class ChunkFn, class MergeFn>
R run_chunked(std::uint64_t total, int jobs, ChunkFn chunk, MergeFn merge) {
    if (jobs < 1) jobs = 1;
    if (jobs == 1 || total < 2) return chunk(0, total);

    const std::uint64_t nchunks = std::min<std::uint64_t>(static_cast<std::uint64_t>(jobs), total);
    std::vector<R> parts(nchunks);
    std::vector<std::exception_ptr> errors(nchunks);
    std::vector<std::thread> workers;
    workers.reserve(nchunks);
    for (std::uint64_t c = 0; c < nchunks; ++c) {
        const std::uint64_t begin = total * c / nchunks;
        const std::uint64_t end = total * (c + 1) / nchunks;
        workers.emplace_back([&, c, begin, end] {
            try {
                parts[c] = chunk(begin, end);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    R acc = std::move(parts[0]);
    for (std::uint64_t c = 1; c < nchunks; ++c) merge(acc, std::move(parts[c]));
    return acc;
}

} // namespace schemelab
