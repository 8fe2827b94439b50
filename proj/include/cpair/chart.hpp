#pragma once

#include "cpair/rational.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace cpair {

/// A coordinate chart: an ordered list of named coordinates, each either
/// periodic (period 2*pi) or unbounded. Charts model Darboux neighborhoods,
/// tori T^n and R^n; they are immutable and shared by reference.
class Chart {
public:
    Chart(std::vector<std::string> names, std::vector<bool> periodic)
        : names_(std::move(names)), periodic_(std::move(periodic)) {
        if (names_.size() != periodic_.size())
            throw Error("Chart: names/periodic length mismatch");
        if (names_.empty()) throw Error("Chart: empty chart");
        for (std::size_t i = 0; i < names_.size(); ++i)
            for (std::size_t j = i + 1; j < names_.size(); ++j)
                if (names_[i] == names_[j])
                    throw Error("Chart: duplicate coordinate name '" + names_[i] + "'");
    }

    int dimension() const { return static_cast<int>(names_.size()); }
    const std::string& name(int i) const { return names_.at(i); }
    const std::vector<std::string>& names() const { return names_; }
    bool periodic(int i) const { return periodic_.at(i); }
    bool all_periodic() const {
        for (bool p : periodic_)
            if (!p) return false;
        return true;
    }

    /// Index of a coordinate by name, -1 when absent.
    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return static_cast<int>(i);
        return -1;
    }

    bool operator==(const Chart& o) const {
        return names_ == o.names_ && periodic_ == o.periodic_;
    }
    bool operator!=(const Chart& o) const { return !(*this == o); }

private:
    std::vector<std::string> names_;
    std::vector<bool> periodic_;
};

using ChartPtr = std::shared_ptr<const Chart>;

inline ChartPtr make_chart(std::vector<std::string> names, std::vector<bool> periodic) {
    return std::make_shared<const Chart>(std::move(names), std::move(periodic));
}

/// All coordinates periodic: the torus T^n with angles theta1..thetan.
inline ChartPtr torus_chart(int n, const std::string& prefix = "theta") {
    std::vector<std::string> names;
    for (int i = 1; i <= n; ++i) names.push_back(prefix + std::to_string(i));
    return make_chart(std::move(names), std::vector<bool>(n, true));
}

inline ChartPtr euclidean_chart(const std::vector<std::string>& names) {
    return make_chart(names, std::vector<bool>(names.size(), false));
}

inline bool same_chart(const ChartPtr& a, const ChartPtr& b) {
    return a == b || (a && b && *a == *b);
}

inline void require_same_chart(const ChartPtr& a, const ChartPtr& b, const char* where) {
    if (!same_chart(a, b)) throw Error(std::string(where) + ": chart mismatch");
}

/// A numeric point on a chart; periodic coordinates are reduced mod 2*pi.
class Point {
public:
    Point(ChartPtr chart, std::vector<double> values)
        : chart_(std::move(chart)), values_(std::move(values)) {
        if (static_cast<int>(values_.size()) != chart_->dimension())
            throw Error("Point: dimension mismatch");
        for (int i = 0; i < chart_->dimension(); ++i)
            if (chart_->periodic(i)) {
                double two_pi = 2.0 * std::numbers::pi;
                values_[i] = std::fmod(values_[i], two_pi);
                if (values_[i] < 0) values_[i] += two_pi;
            }
    }

    const ChartPtr& chart() const { return chart_; }
    double operator[](int i) const { return values_.at(i); }
    const std::vector<double>& values() const { return values_; }
    int dimension() const { return chart_->dimension(); }

private:
    ChartPtr chart_;
    std::vector<double> values_;
};

}  // namespace cpair
