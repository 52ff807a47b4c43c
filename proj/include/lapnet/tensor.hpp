// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "lapnet/common.hpp"

namespace lapnet {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
}

// Dense double tensor, row-major. Rank is 1 or 2 everywhere in this project.
// grad is allocated (zeroed) iff requires_grad; it accumulates across backward
// passes until zero_grad().
struct Tensor {
    Shape shape;
    std::vector<double> values;
    std::vector<double> grad;
    bool requires_grad = false;

    Tensor() = default;
    Tensor(Shape s, std::vector<double> v, bool rg = false)
        : shape(std::move(s)), values(std::move(v)), requires_grad(rg) {
        if (shape_size(shape) != values.size())
            throw DimensionError("tensor shape does not match value count");
        if (requires_grad) grad.assign(values.size(), 0.0);
    }

    static Tensor zeros(Shape s, bool rg = false) {
        std::size_t n = shape_size(s);
        return Tensor(std::move(s), std::vector<double>(n, 0.0), rg);
    }

    std::size_t size() const { return values.size(); }

    double& at(std::size_t i) { return values[i]; }
    double at(std::size_t i) const { return values[i]; }

    // Row-major element of a rank-2 tensor.
    double at2(std::size_t r, std::size_t c) const { return values[r * shape[1] + c]; }

    void zero_grad() {
        if (requires_grad) grad.assign(values.size(), 0.0);
    }
};

}  // namespace lapnet
