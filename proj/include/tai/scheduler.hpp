#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

namespace tai {

using Task = std::function<void()>;

class Scheduler {
public:
    virtual ~Scheduler() = default;
    virtual void submit(Task task) = 0;
    virtual void submit_after(std::chrono::milliseconds delay, Task task) = 0;
};

// Runs nothing until drain(); used for batch runs and tests. Delayed tasks are
// held until release_delayed() moves them to the ready queue.
class InlineScheduler final : public Scheduler {
public:
    void submit(Task task) override;
    void submit_after(std::chrono::milliseconds delay, Task task) override;

    // Runs ready tasks, including ones they submit, until none remain.
    // Returns how many ran.
    std::size_t drain();
    std::size_t release_delayed();
    std::size_t delayed() const;

private:
    mutable std::mutex mutex_;
    std::deque<Task> ready_;
    std::vector<Task> delayed_;
};

// Fixed pool of worker threads plus a timer for delayed tasks. The pool size
// bounds how many tasks (and therefore LLM calls) run at once.
class ThreadPoolScheduler final : public Scheduler {
public:
    explicit ThreadPoolScheduler(std::size_t workers);
    ~ThreadPoolScheduler() override;

    ThreadPoolScheduler(const ThreadPoolScheduler&) = delete;
    ThreadPoolScheduler& operator=(const ThreadPoolScheduler&) = delete;

    void submit(Task task) override;
    void submit_after(std::chrono::milliseconds delay, Task task) override;

    // Blocks until no task is queued, delayed, or running.
    void wait_idle();
    void stop();

private:
    using TimePoint = std::chrono::steady_clock::time_point;

    void worker_loop();
    void timer_loop();

    std::mutex mutex_;
    std::condition_variable work_cv_;
    std::condition_variable timer_cv_;
    std::condition_variable idle_cv_;
    std::deque<Task> ready_;
    std::multimap<TimePoint, Task> timed_;
    std::size_t running_ = 0;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
    std::thread timer_;
};

}  // namespace tai
