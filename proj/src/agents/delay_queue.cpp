/**
 * @file delay_queue.cpp
 */

#include "ehrgate/agents/delay_queue.hpp"

namespace ehrgate::agents {

DelayQueue::DelayQueue() : worker_([this] { run(); }) {}

DelayQueue::~DelayQueue() { stop(); }

void DelayQueue::schedule(std::chrono::milliseconds delay, std::function<void()> fn) {
    {
        std::lock_guard lock(mutex_);
        if (!stopping_) {
            pending_.push({std::chrono::steady_clock::now() + delay, next_order_++, std::move(fn)});
            fn = nullptr;
        }
    }
    if (fn) {
        fn();
        return;
    }
    changed_.notify_one();
}

void DelayQueue::stop() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    changed_.notify_one();
    if (worker_.joinable()) worker_.join();
}

void DelayQueue::run() {
    std::unique_lock lock(mutex_);
    while (true) {
        if (pending_.empty()) {
            if (stopping_) return;
            changed_.wait(lock);
            continue;
        }
        auto due = pending_.top().due;
        if (!stopping_ && std::chrono::steady_clock::now() < due) {
            changed_.wait_until(lock, due);
            continue;
        }
        auto fn = pending_.top().fn;
        pending_.pop();
        lock.unlock();
        fn();
        lock.lock();
    }
}

} // namespace ehrgate::agents
