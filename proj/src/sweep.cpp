#include "catqnd/sweep.hpp"

#include <algorithm>

#include "catqnd/errors.hpp"

namespace catqnd {

void SweepResult::add_row(std::vector<double> r) {
    if (r.size() != columns.size())
        throw DimensionError("row width " + std::to_string(r.size()) + " != column count " +
                             std::to_string(columns.size()));
    rows.push_back(std::move(r));
}

int SweepResult::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

std::vector<double> SweepResult::column_values(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw ValidationError("no column named '" + name + "'");
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r[c]);
    return v;
}

int worker_count() {
    if (const char* e = std::getenv("CATQND_THREADS")) {
        const int n = std::atoi(e);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace catqnd
