#include "ozbias/threading.hpp"

#include <algorithm>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

namespace ozbias {

namespace {

class Pool {
 public:
  explicit Pool(int n) : stop_(false), pending_(0), generation_(0) {
    for (int i = 1; i < n; ++i) {
      workers_.emplace_back([this, i] { worker_loop(i); });
    }
  }

  ~Pool() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : workers_) t.join();
  }

  int size() const { return static_cast<int>(workers_.size()) + 1; }

  void run(int n, const std::function<void(int, int)>& fn) {
    int parts = std::min(size(), n);
    if (parts <= 1) {
      if (n > 0) fn(0, n);
      return;
    }
    {
      std::lock_guard<std::mutex> lock(mutex_);
      task_ = &fn;
      task_n_ = n;
      task_parts_ = parts;
      pending_ = parts - 1;
      ++generation_;
    }
    cv_.notify_all();
    run_chunk(0);
    std::unique_lock<std::mutex> lock(mutex_);
    done_cv_.wait(lock, [this] { return pending_ == 0; });
    task_ = nullptr;
  }

 private:
  void run_chunk(int part) {
    // Contiguous block decomposition; chunk boundaries depend only on
    // (n, parts), never on scheduling.
    long long n = task_n_, parts = task_parts_;
    int begin = static_cast<int>(n * part / parts);
    int end = static_cast<int>(n * (part + 1) / parts);
    if (begin < end) (*task_)(begin, end);
  }

  void worker_loop(int index) {
    long long seen = 0;
    for (;;) {
      bool has_chunk = false;
      {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [&] { return stop_ || generation_ > seen; });
        if (stop_) return;
        seen = generation_;
        has_chunk = index < task_parts_;
      }
      if (has_chunk) {
        run_chunk(index);
        std::lock_guard<std::mutex> lock(mutex_);
        if (--pending_ == 0) done_cv_.notify_one();
      }
    }
  }

  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  bool stop_;
  const std::function<void(int, int)>* task_ = nullptr;
  int task_n_ = 0;
  int task_parts_ = 0;
  int pending_;
  long long generation_;
};

std::unique_ptr<Pool> g_pool;
int g_threads = 0;  // 0 = not yet configured
std::mutex g_config_mutex;

Pool& pool() {
  std::lock_guard<std::mutex> lock(g_config_mutex);
  if (!g_pool) {
    int n = g_threads > 0 ? g_threads
                          : std::max(1u, std::thread::hardware_concurrency());
    g_pool = std::make_unique<Pool>(n);
  }
  return *g_pool;
}

}  // namespace

void set_thread_count(int n) {
  std::unique_ptr<Pool> old;
  {
    std::lock_guard<std::mutex> lock(g_config_mutex);
    g_threads = std::max(1, n);
    old = std::move(g_pool);
  }
  old.reset();
}

int thread_count() { return pool().size(); }

void parallel_for(int n, const std::function<void(int, int)>& fn) {
  if (n <= 0) return;
  pool().run(n, fn);
}

}  // namespace ozbias
