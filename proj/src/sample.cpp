#include "expcp/sample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "expcp/error.hpp"

namespace expcp {

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
        throw InputError("sample needs at least 2 observations, got " +
                         std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double x = values_[i];
        if (!std::isfinite(x) || x <= 0.0) {
            throw InputError("observation " + std::to_string(i + 1) +
                             " is not a positive finite number");
        }
    }
}

Sample Sample::slice(std::size_t first, std::size_t last) const {
    if (first > last || last > values_.size()) {
        throw InputError("slice out of range");
    }
    return Sample(std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(first),
                                      values_.begin() + static_cast<std::ptrdiff_t>(last)));
}

Sample Sample::reversed() const {
    return Sample(std::vector<double>(values_.rbegin(), values_.rend()));
}

Sample Sample::scaled(double factor) const {
    std::vector<double> out(values_);
    for (double& x : out) x *= factor;
    return Sample(std::move(out));
}

}  // namespace expcp
