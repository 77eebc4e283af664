#include "tai/scheduler.hpp"

#include <iostream>

namespace tai {

void InlineScheduler::submit(Task task) {
    std::lock_guard lock(mutex_);
    ready_.push_back(std::move(task));
}

void InlineScheduler::submit_after(std::chrono::milliseconds, Task task) {
    std::lock_guard lock(mutex_);
    delayed_.push_back(std::move(task));
}

std::size_t InlineScheduler::drain() {
    std::size_t ran = 0;
    for (;;) {
        Task task;
        {
            std::lock_guard lock(mutex_);
            if (ready_.empty()) return ran;
            task = std::move(ready_.front());
            ready_.pop_front();
        }
        task();
        ++ran;
    }
}

std::size_t InlineScheduler::release_delayed() {
    std::lock_guard lock(mutex_);
    const std::size_t n = delayed_.size();
    for (auto& t : delayed_) ready_.push_back(std::move(t));
    delayed_.clear();
    return n;
}

std::size_t InlineScheduler::delayed() const {
    std::lock_guard lock(mutex_);
    return delayed_.size();
}

ThreadPoolScheduler::ThreadPoolScheduler(std::size_t workers) {
    if (workers == 0) workers = 1;
    for (std::size_t i = 0; i < workers; ++i) workers_.emplace_back([this] { worker_loop(); });
    timer_ = std::thread([this] { timer_loop(); });
}

ThreadPoolScheduler::~ThreadPoolScheduler() { stop(); }

void ThreadPoolScheduler::submit(Task task) {
    {
        std::lock_guard lock(mutex_);
        if (stopping_) return;
        ready_.push_back(std::move(task));
    }
    work_cv_.notify_one();
}

void ThreadPoolScheduler::submit_after(std::chrono::milliseconds delay, Task task) {
    {
        std::lock_guard lock(mutex_);
        if (stopping_) return;
        timed_.emplace(std::chrono::steady_clock::now() + delay, std::move(task));
    }
    timer_cv_.notify_one();
}

void ThreadPoolScheduler::wait_idle() {
    std::unique_lock lock(mutex_);
    idle_cv_.wait(lock, [this] { return (ready_.empty() && timed_.empty() && running_ == 0) || stopping_; });
}

void ThreadPoolScheduler::stop() {
    {
        std::lock_guard lock(mutex_);
        if (stopping_) return;
        stopping_ = true;
    }
    work_cv_.notify_all();
    timer_cv_.notify_all();
    idle_cv_.notify_all();
    for (auto& w : workers_) w.join();
    if (timer_.joinable()) timer_.join();
}

void ThreadPoolScheduler::worker_loop() {
    for (;;) {
        Task task;
        {
            std::unique_lock lock(mutex_);
            work_cv_.wait(lock, [this] { return stopping_ || !ready_.empty(); });
            if (stopping_) return;
            task = std::move(ready_.front());
            ready_.pop_front();
            ++running_;
        }
        try {
            task();
        } catch (const std::exception& e) {
            std::cerr << "background task failed: " << e.what() << '\n';
        }
        {
            std::lock_guard lock(mutex_);
            --running_;
        }
        idle_cv_.notify_all();
    }
}

void ThreadPoolScheduler::timer_loop() {
    std::unique_lock lock(mutex_);
    while (!stopping_) {
        if (timed_.empty()) {
            timer_cv_.wait(lock, [this] { return stopping_ || !timed_.empty(); });
            continue;
        }
        const auto due = timed_.begin()->first;
        if (std::chrono::steady_clock::now() < due) {
            timer_cv_.wait_until(lock, due);
            continue;
        }
        ready_.push_back(std::move(timed_.begin()->second));
        timed_.erase(timed_.begin());
        work_cv_.notify_one();
    }
}

}  // namespace tai
