#pragma once

#include "mflq/error.hpp"

#include <string>
#include <vector>

namespace mflq {

/// Storage for a family indexed by pairs (i, j) with 0 ≤ i < rows and
/// i ≤ j ≤ last. Problem data use last = N−1 (pairs (t, k)); recursion
/// tables use last = N (pairs (k, ℓ) including the terminal column).
template <typename T>
class TriangularFamily {
public:
    TriangularFamily() = default;

    TriangularFamily(int rows, int last, const T& fill = T{})
        : rows_(rows), last_(last) {
        offsets_.reserve(static_cast<std::size_t>(rows) + 1);
        std::size_t total = 0;
        for (int i = 0; i < rows; ++i) {
            offsets_.push_back(total);
            total += static_cast<std::size_t>(last - i + 1);
        }
        offsets_.push_back(total);
        data_.assign(total, fill);
    }

    int rows() const noexcept { return rows_; }
    int last() const noexcept { return last_; }
    bool contains(int i, int j) const noexcept {
        return i >= 0 && i < rows_ && j >= i && j <= last_;
    }

    T& operator()(int i, int j) { return data_[index(i, j)]; }
    const T& operator()(int i, int j) const { return data_[index(i, j)]; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

private:
    std::size_t index(int i, int j) const {
        if (!contains(i, j)) {
            throw Error(ErrorKind::HorizonMismatch,
                        "index (" + std::to_string(i) + "," + std::to_string(j) +
                            ") outside triangular family");
        }
        return offsets_[static_cast<std::size_t>(i)] + static_cast<std::size_t>(j - i);
    }

    int rows_ = 0;
    int last_ = -1;
    std::vector<std::size_t> offsets_;
    std::vector<T> data_;
};

}  // namespace mflq
