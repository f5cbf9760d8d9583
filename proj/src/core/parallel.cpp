#include "carbospec/parallel.hpp"

#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace carbospec {
namespace {

int gConfiguredThreads = 0; // 0 = unresolved
thread_local bool tlInsideParallelFor = false;

int resolveThreads() {
    if (gConfiguredThreads > 0) return gConfiguredThreads;
    if (const char* env = std::getenv("CARBOSPEC_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Lazily started pool of (threads - 1) workers; the calling thread runs
// part 0 itself. One job at a time; nested calls execute inline.
class Pool {
public:
    static Pool& instance() {
        static Pool pool;
        return pool;
    }

    void run(int parts, const std::function<void(int)>& work) {
        std::unique_lock<std::mutex> guard(jobMutex_);
        ensureWorkers(parts - 1);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            job_ = &work;
            partsTotal_ = parts;
            nextPart_ = 1;
            remaining_ = parts - 1;
            ++generation_;
        }
        wake_.notify_all();
        work(0);
        {
            std::unique_lock<std::mutex> lock(mutex_);
            done_.wait(lock, [this] { return remaining_ == 0; });
            job_ = nullptr;
        }
    }

private:
    Pool() = default;
    ~Pool() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            stop_ = true;
            ++generation_;
        }
        wake_.notify_all();
        for (auto& worker : workers_) worker.join();
    }

    void ensureWorkers(int count) {
        while (static_cast<int>(workers_.size()) < count) {
            workers_.emplace_back([this] { workerLoop(); });
        }
    }

    void workerLoop() {
        std::uint64_t seen = 0;
        std::unique_lock<std::mutex> lock(mutex_);
        while (true) {
            wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
            while (job_ != nullptr && nextPart_ < partsTotal_) {
                const int part = nextPart_++;
                const auto* job = job_;
                lock.unlock();
                (*job)(part);
                lock.lock();
                if (--remaining_ == 0) done_.notify_one();
            }
        }
    }

    std::mutex jobMutex_; // serializes run() callers
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    std::vector<std::thread> workers_;
    const std::function<void(int)>* job_ = nullptr;
    std::uint64_t generation_ = 0;
    int partsTotal_ = 0;
    int nextPart_ = 0;
    int remaining_ = 0;
    bool stop_ = false;
};

} // namespace

void setThreadCount(int threads) { gConfiguredThreads = threads; }

int threadCount() { return resolveThreads(); }

void parallelFor(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    int threads = resolveThreads();
    if (static_cast<std::size_t>(threads) > n) threads = static_cast<int>(n);

    if (threads == 1 || tlInsideParallelFor) {
        body(0, n);
        return;
    }

    const std::size_t chunk = (n + threads - 1) / static_cast<std::size_t>(threads);
    std::function<void(int)> work = [&](int part) {
        const std::size_t begin = chunk * static_cast<std::size_t>(part);
        if (begin >= n) return;
        const std::size_t end = begin + chunk < n ? begin + chunk : n;
        tlInsideParallelFor = true;
        body(begin, end);
        tlInsideParallelFor = false;
    };
    Pool::instance().run(threads, work);
}

} // namespace carbospec
