// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared plumbing: shapes, error types, a seeded portable RNG and a small
// thread pool used for intra-op parallelism (capped by TSFP_THREADS).

#pragma once

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace tsfp {

using Shape = std::vector<int>;

inline std::int64_t numel(const Shape& shape) {
    std::int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
}

inline std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ')';
    return os.str();
}

// Dimension mismatch carrying the offending axis name ("time", "height", ...).
class ShapeError : public std::runtime_error {
public:
    ShapeError(std::string axis, const std::string& message)
        : std::runtime_error(message), axis_(std::move(axis)) {}
    const std::string& axis() const { return axis_; }

private:
    std::string axis_;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

// mt19937_64-backed generator producing platform-independent streams (the
// standard distributions are implementation-defined, so we map the raw bits
// ourselves).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi], inclusive. Rejection-free modulo bias is
    // irrelevant at the ranges used here, but keep it unbiased anyway.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % span;
        std::uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return lo + static_cast<std::int64_t>(x % span);
    }

private:
    std::mt19937_64 gen_;
};

namespace detail {

class ThreadPool {
public:
    static ThreadPool& instance() {
        static ThreadPool pool;
        return pool;
    }

    int workers() const { return static_cast<int>(threads_.size()); }

    // Runs fn(chunk) for chunk in [0, chunks) across the pool, inline when the
    // pool is empty or only one chunk is requested. Blocks until all chunks
    // completed. Job state is shared-owned so stragglers stay safe after run()
    // returns.
    void run(int chunks, std::function<void(int)> fn) {
        if (chunks <= 1 || threads_.empty()) {
            for (int c = 0; c < chunks; ++c) fn(c);
            return;
        }
        struct JobState {
            std::atomic<int> next{0};
            std::atomic<int> done{0};
            int chunks = 0;
            std::function<void(int)> fn;
        };
        auto state = std::make_shared<JobState>();
        state->chunks = chunks;
        state->fn = std::move(fn);
        auto drive = [](const std::shared_ptr<JobState>& s) {
            for (;;) {
                const int c = s->next.fetch_add(1);
                if (c >= s->chunks) break;
                s->fn(c);
                s->done.fetch_add(1);
            }
        };
        {
            std::lock_guard<std::mutex> lock(mutex_);
            job_ = [state, drive] { drive(state); };
            generation_++;
        }
        cv_.notify_all();
        drive(state);  // the calling thread participates too
        while (state->done.load() < chunks) std::this_thread::yield();
        std::lock_guard<std::mutex> lock(mutex_);
        job_ = nullptr;
    }

private:
    ThreadPool() {
        int n = hardware_threads();
        for (int i = 0; i + 1 < n; ++i) {
            threads_.emplace_back([this] { worker_loop(); });
        }
    }

    ~ThreadPool() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            stop_ = true;
            generation_++;
        }
        cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    static int hardware_threads() {
        int n = static_cast<int>(std::thread::hardware_concurrency());
        if (n <= 0) n = 1;
        if (const char* env = std::getenv("TSFP_THREADS")) {
            const int cap = std::atoi(env);
            if (cap >= 1) n = std::min(n, cap);
        }
        return n;
    }

    void worker_loop() {
        std::uint64_t seen = 0;
        for (;;) {
            std::function<void()> job;
            {
                std::unique_lock<std::mutex> lock(mutex_);
                cv_.wait(lock, [&] { return stop_ || (generation_ != seen && job_); });
                if (stop_) return;
                seen = generation_;
                job = job_;
            }
            if (job) job();
        }
    }

    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::function<void()> job_;
    std::uint64_t generation_ = 0;
    bool stop_ = false;
};

}  // namespace detail

inline int max_threads() { return detail::ThreadPool::instance().workers() + 1; }

// Splits [0, n) into contiguous chunks and runs body(begin, end) for each.
// Chunk boundaries depend only on n, so results are identical for any thread
// count as long as the chunks write disjoint outputs.
template <class Body>
void parallel_for(std::int64_t n, const Body& body, std::int64_t grain = 2048) {
    if (n <= 0) return;
    const int threads = max_threads();
    if (threads <= 1 || n <= grain) {
        body(static_cast<std::int64_t>(0), n);
        return;
    }
    const std::int64_t chunks =
        std::min<std::int64_t>(threads, (n + grain - 1) / grain);
    const std::int64_t per = (n + chunks - 1) / chunks;
    detail::ThreadPool::instance().run(static_cast<int>(chunks), [&](int c) {
        const std::int64_t begin = c * per;
        const std::int64_t end = std::min(n, begin + per);
        if (begin < end) body(begin, end);
    });
}

}  // namespace tsfp
