/**
 * @file delay_queue.hpp
 * @brief Runs callbacks after a delay on a private thread
 */

#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

namespace ehrgate::agents {

class DelayQueue {
public:
    DelayQueue();
    ~DelayQueue();

    DelayQueue(const DelayQueue&) = delete;
    DelayQueue& operator=(const DelayQueue&) = delete;

    void schedule(std::chrono::milliseconds delay, std::function<void()> fn);
    /// Runs everything still pending immediately, then joins.
    void stop();

private:
    using TimePoint = std::chrono::steady_clock::time_point;
    struct Entry {
        TimePoint due;
        std::uint64_t order;
        std::function<void()> fn;
        bool operator>(const Entry& o) const { return due != o.due ? due > o.due : order > o.order; }
    };

    void run();

    std::mutex mutex_;
    std::condition_variable changed_;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pending_;
    std::uint64_t next_order_ = 0;
    bool stopping_ = false;
    std::thread worker_;
};

} // namespace ehrgate::agents
