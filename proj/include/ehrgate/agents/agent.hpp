/**
 * @file agent.hpp
 * @brief Actor base: one bounded inbox, one thread, strictly serial handling
 */

#pragma once

#include "ehrgate/agents/messages.hpp"

#include <atomic>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

namespace ehrgate::agents {

/// How agents address each other. Agents never hold references to peers.
class Router {
public:
    virtual ~Router() = default;
    /// Delivers or, if the target refuses, rejects the message's reply slot.
    virtual void send(AgentKind to, AgentMessage msg) = 0;
};

class Agent {
public:
    Agent(AgentKind kind, std::size_t inbox_bound);
    virtual ~Agent();

    Agent(const Agent&) = delete;
    Agent& operator=(const Agent&) = delete;

    AgentKind kind() const noexcept { return kind_; }

    /// False when the inbox is full or the agent is stopping; @p msg is then
    /// left untouched so the caller can reject it.
    bool post(AgentMessage& msg);

    void start();
    /// Drains the inbox, then joins the worker thread. Idempotent.
    void stop();

    std::size_t processed() const noexcept { return processed_.load(); }
    std::thread::id worker_id() const noexcept { return worker_.get_id(); }

protected:
    virtual void handle(AgentMessage msg) = 0;

private:
    void run();

    AgentKind kind_;
    std::size_t bound_;
    std::mutex mutex_;
    std::condition_variable ready_;
    std::deque<AgentMessage> inbox_;
    bool accepting_ = false;
    bool stopping_ = false;
    std::atomic<std::size_t> processed_{0};
    std::thread worker_;
};

} // namespace ehrgate::agents
