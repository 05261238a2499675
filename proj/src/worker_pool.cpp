#include "falcon/worker_pool.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace falcon {

worker_pool::worker_pool(unsigned workers) {
    if (workers == 0)
        workers = default_workers();
    threads_.reserve(workers);
    for (unsigned i = 0; i < workers; ++i)
        threads_.emplace_back([this] { run(); });
}

worker_pool::~worker_pool() {
    {
        std::lock_guard lock(m_);
        stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_)
        t.join();
}

void worker_pool::submit(std::function<void()> job) {
    {
        std::lock_guard lock(m_);
        queue_.push_back(std::move(job));
    }
    cv_.notify_one();
}

void worker_pool::run() {
    for (;;) {
        std::function<void()> job;
        {
            std::unique_lock lock(m_);
            cv_.wait(lock, [this] { return stop_ || !queue_.empty(); });
            if (queue_.empty())
                return; // stop requested and queue drained
            job = std::move(queue_.front());
            queue_.pop_front();
        }
        job();
    }
}

unsigned worker_pool::default_workers() noexcept {
    if (const char* env = std::getenv("FALCON_WORKERS")) {
        unsigned v = 0;
        const auto [p, ec] = std::from_chars(env, env + std::strlen(env), v);
        if (ec == std::errc{} && *p == '\0' && v > 0)
            return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

} // namespace falcon
