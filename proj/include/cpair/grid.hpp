#pragma once

#include "cpair/chart.hpp"
#include "cpair/normal_form.hpp"

#include <future>
#include <numbers>
#include <thread>
#include <vector>

namespace cpair {

/// Lattice over a chart: periodic coordinates sample [0, 2pi) uniformly,
/// non-periodic ones sample [-1, 1] (the default verified region for
/// unbounded charts; reports state this region).
class GridSpec {
public:
    explicit GridSpec(ChartPtr chart, int points_per_axis = 17)
        : chart_(std::move(chart)), m_(points_per_axis) {
        if (m_ < 2) throw Error("GridSpec: need at least 2 points per axis");
        total_ = 1;
        for (int i = 0; i < chart_->dimension(); ++i) total_ *= static_cast<std::size_t>(m_);
    }

    std::size_t size() const { return total_; }
    int points_per_axis() const { return m_; }
    const ChartPtr& chart() const { return chart_; }

    std::vector<double> point_at(std::size_t linear_index) const {
        const int n = chart_->dimension();
        std::vector<double> x(n);
        std::size_t rest = linear_index;
        for (int i = 0; i < n; ++i) {
            std::size_t k = rest % m_;
            rest /= m_;
            if (chart_->periodic(i)) {
                x[i] = (2.0 * std::numbers::pi * double(k)) / double(m_);
            } else {
                x[i] = -1.0 + 2.0 * double(k) / double(m_ - 1);
            }
        }
        return x;
    }

private:
    ChartPtr chart_;
    int m_;
    std::size_t total_;
};

struct GridMin {
    double min_abs = std::numeric_limits<double>::infinity();
    std::vector<double> argmin;
};

/// Minimum of |f| over the grid. Grid chunks evaluate in parallel (each task
/// is pure); the reduction is deterministic: ties break toward the lower
/// linear index, and chunks merge in index order.
inline GridMin grid_min_abs(const GridSpec& grid, const CompiledScalar& f) {
    const std::size_t total = grid.size();
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, total));
    const std::size_t chunk = (total + workers - 1) / workers;

    struct Partial {
        double min_abs;
        std::size_t index;
    };
    std::vector<std::future<Partial>> futures;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t begin = w * chunk, end = std::min(total, begin + chunk);
        if (begin >= end) break;
        futures.push_back(std::async(std::launch::async, [&grid, &f, begin, end] {
            Partial best{std::numeric_limits<double>::infinity(), begin};
            for (std::size_t i = begin; i < end; ++i) {
                double v = std::abs(f(grid.point_at(i)));
                if (v < best.min_abs) {
                    best.min_abs = v;
                    best.index = i;
                }
            }
            return best;
        }));
    }
    Partial best{std::numeric_limits<double>::infinity(), 0};
    for (auto& fut : futures) {
        Partial p = fut.get();
        if (p.min_abs < best.min_abs || (p.min_abs == best.min_abs && p.index < best.index))
            best = p;
    }
    GridMin r;
    r.min_abs = best.min_abs;
    r.argmin = grid.point_at(best.index);
    return r;
}

}  // namespace cpair
