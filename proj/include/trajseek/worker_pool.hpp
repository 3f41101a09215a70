#ifndef TRAJSEEK_WORKER_POOL_HPP
#define TRAJSEEK_WORKER_POOL_HPP

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace trajseek {

inline std::size_t hardware_workers() {
    const auto n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

/// Worker count from the TRAJSEEK_WORKERS environment variable, or the
/// machine parallelism when unset or unparsable.
inline std::size_t default_workers() {
    if (const char* env = std::getenv("TRAJSEEK_WORKERS")) {
        try {
            const long v = std::stol(env);
            if (v > 0)
                return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return hardware_workers();
}

/// Fixed-size pool running one data-parallel loop at a time.
///
/// `parallel_for(n, body)` splits [0, n) into `size()` contiguous chunks and
/// calls `body(begin, end, chunk)` once per chunk. A pool of size 1 runs the
/// body inline on the calling thread.
class worker_pool {
public:
    explicit worker_pool(std::size_t workers = default_workers()) : size_(std::max<std::size_t>(workers, 1)) {
        for (std::size_t w = 1; w < size_; ++w)
            threads_.emplace_back([this, w] { run(w); });
    }

    worker_pool(const worker_pool&) = delete;
    worker_pool& operator=(const worker_pool&) = delete;

    ~worker_pool() {
        {
            std::lock_guard lock(mutex_);
            stopping_ = true;
        }
        wake_.notify_all();
        for (auto& t : threads_)
            t.join();
    }

    std::size_t size() const { return size_; }

    /// Number of chunks `parallel_for(n, ...)` will produce.
    std::size_t chunks_for(std::size_t n) const { return std::min(n, size_); }

    template <class Body>
    void parallel_for(std::size_t n, Body&& body) {
        const std::size_t chunks = chunks_for(n);
        if (chunks == 0)
            return;
        auto chunk_bounds = [n, chunks](std::size_t c) {
            const std::size_t base = n / chunks;
            const std::size_t extra = n % chunks;
            const std::size_t begin = c * base + std::min(c, extra);
            return std::pair{begin, begin + base + (c < extra ? 1 : 0)};
        };
        if (chunks == 1) {
            body(std::size_t{0}, n, std::size_t{0});
            return;
        }

        std::function<void(std::size_t)> task = [&](std::size_t c) {
            const auto [b, e] = chunk_bounds(c);
            body(b, e, c);
        };
        {
            std::lock_guard lock(mutex_);
            task_ = &task;
            active_chunks_ = chunks;
            pending_ = chunks - 1;
            error_ = nullptr;
            ++generation_;
        }
        wake_.notify_all();

        // The calling thread takes chunk 0.
        try {
            task(0);
        } catch (...) {
            std::lock_guard lock(mutex_);
            if (!error_)
                error_ = std::current_exception();
        }

        std::unique_lock lock(mutex_);
        done_.wait(lock, [this] { return pending_ == 0; });
        task_ = nullptr;
        if (error_)
            std::rethrow_exception(std::exchange(error_, nullptr));
    }

private:
    void run(std::size_t worker) {
        std::size_t seen = 0;
        for (;;) {
            std::function<void(std::size_t)>* task = nullptr;
            {
                std::unique_lock lock(mutex_);
                wake_.wait(lock, [&] { return stopping_ || generation_ != seen; });
                if (stopping_)
                    return;
                seen = generation_;
                if (worker >= active_chunks_)
                    continue;
                task = task_;
            }
            try {
                (*task)(worker);
            } catch (...) {
                std::lock_guard lock(mutex_);
                if (!error_)
                    error_ = std::current_exception();
            }
            {
                std::lock_guard lock(mutex_);
                if (--pending_ == 0)
                    done_.notify_one();
            }
        }
    }

    std::size_t size_;
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    std::function<void(std::size_t)>* task_ = nullptr;
    std::size_t active_chunks_ = 0;
    std::size_t pending_ = 0;
    std::size_t generation_ = 0;
    std::exception_ptr error_;
    bool stopping_ = false;
};

} // namespace trajseek

#endif // TRAJSEEK_WORKER_POOL_HPP
