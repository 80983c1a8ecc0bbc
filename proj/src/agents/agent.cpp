/**
 * @file agent.cpp
 */

#include "ehrgate/agents/agent.hpp"

#include <cstdio>
#include <exception>

namespace ehrgate::agents {

Agent::Agent(AgentKind kind, std::size_t inbox_bound) : kind_(kind), bound_(inbox_bound) {}

Agent::~Agent() { stop(); }

bool Agent::post(AgentMessage& msg) {
    {
        std::lock_guard lock(mutex_);
        if (!accepting_ || inbox_.size() >= bound_) return false;
        inbox_.push_back(std::move(msg));
    }
    ready_.notify_one();
    return true;
}

void Agent::start() {
    std::lock_guard lock(mutex_);
    if (worker_.joinable()) return;
    accepting_ = true;
    stopping_ = false;
    worker_ = std::thread([this] { run(); });
}

void Agent::stop() {
    {
        std::lock_guard lock(mutex_);
        accepting_ = false;
        stopping_ = true;
    }
    ready_.notify_one();
    if (worker_.joinable() && worker_.get_id() != std::this_thread::get_id()) worker_.join();
}

void Agent::run() {
    while (true) {
        AgentMessage msg;
        {
            std::unique_lock lock(mutex_);
            ready_.wait(lock, [this] { return stopping_ || !inbox_.empty(); });
            if (inbox_.empty()) return;
            msg = std::move(inbox_.front());
            inbox_.pop_front();
        }
        if (std::holds_alternative<Shutdown>(msg.payload)) {
            ++processed_;
            continue;
        }
        try {
            handle(std::move(msg));
        } catch (const std::exception& e) {
            // handle() owns msg; a throw here means its reply slot is lost
            // and the caller sees broken_promise.
            std::fprintf(stderr, "agent %s: unhandled exception: %s\n",
                         std::string(to_string(kind_)).c_str(), e.what());
        }
        ++processed_;
    }
}

} // namespace ehrgate::agents
