#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace falcon {

// Fixed-size FIFO thread pool. Jobs must not throw; stage code catches and
// records its own failures.
class worker_pool {
public:
    explicit worker_pool(unsigned workers);
    ~worker_pool();
    worker_pool(const worker_pool&) = delete;
    worker_pool& operator=(const worker_pool&) = delete;

    void submit(std::function<void()> job);

    unsigned size() const noexcept {
        return static_cast<unsigned>(threads_.size());
    }

    // FALCON_WORKERS when set, otherwise hardware concurrency.
    static unsigned default_workers() noexcept;

private:
    void run();

    std::mutex m_;
    std::condition_variable cv_;
    std::deque<std::function<void()>> queue_;
    bool stop_ = false;
    std::vector<std::thread> threads_;
};

} // namespace falcon
