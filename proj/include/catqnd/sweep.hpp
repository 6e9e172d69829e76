#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <json.hpp>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace catqnd {

struct SweepResult {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    nlohmann::json metadata = nlohmann::json::object();

    void add_row(std::vector<double> r);  // DimensionError unless r.size() == columns.size()
    int column(const std::string& name) const;  // index or -1
    std::vector<double> column_values(const std::string& name) const;
};

// Worker count from CATQND_THREADS, else hardware concurrency, at least 1.
int worker_count();

// Runs fn(i) for i in [0, n) over `workers` threads. Each index writes only its
// own output slot, so results do not depend on the worker count. The first
// exception (lowest index) is rethrown after all workers join.
template <class Fn>
void parallel_for(int n, Fn&& fn, int workers = worker_count()) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errs(n);
    auto work = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(workers, n); ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace catqnd
