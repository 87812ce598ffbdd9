#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace expcp {

/// An ordered sequence of positive, finite observations X_1..X_K with K >= 2.
class Sample {
public:
    explicit Sample(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Observations [first, last) as a new sample; the slice must hold >= 2 values.
    Sample slice(std::size_t first, std::size_t last) const;
    Sample reversed() const;
    Sample scaled(double factor) const;

private:
    std::vector<double> values_;
};

}  // namespace expcp
