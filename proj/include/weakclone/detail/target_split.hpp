// Copyright 2026 The weakclone Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "weakclone/error.hpp"

namespace weakclone::detail {

/// Splits a row-major tensor index space into target digits and the rest.
class TargetSplit {
  public:
    TargetSplit(std::span<const std::size_t> dims, std::span<const std::size_t> targets) {
        const std::size_t rank = dims.size();
        std::vector<bool> is_target(rank, false);
        for (std::size_t t : targets) {
            if (t >= rank) {
                throw Error(Errc::index_out_of_range, "subsystem index out of range");
            }
            if (is_target[t]) {
                throw Error(Errc::shape, "repeated subsystem index");
            }
            is_target[t] = true;
        }
        std::vector<std::size_t> strides(rank, 1);
        for (std::size_t i = rank; i-- > 1;) {
            strides[i - 1] = strides[i] * dims[i];
        }
        target_size_ = 1;
        for (std::size_t t : targets) {
            target_size_ *= dims[t];
        }
        target_offsets_.assign(target_size_, 0);
        std::size_t block = target_size_;
        for (std::size_t t : targets) {
            block /= dims[t];
            for (std::size_t k = 0; k < target_size_; ++k) {
                target_offsets_[k] += ((k / block) % dims[t]) * strides[t];
            }
        }
        for (std::size_t i = 0; i < rank; ++i) {
            if (!is_target[i]) {
                rest_dims_.push_back(dims[i]);
                rest_strides_.push_back(strides[i]);
                rest_subsystems_.push_back(i);
            }
        }
        rest_size_ = 1;
        for (std::size_t d : rest_dims_) {
            rest_size_ *= d;
        }
    }

    std::size_t target_size() const { return target_size_; }
    std::size_t rest_size() const { return rest_size_; }
    const std::vector<std::size_t> &target_offsets() const { return target_offsets_; }
    const std::vector<std::size_t> &rest_dims() const { return rest_dims_; }
    const std::vector<std::size_t> &rest_subsystems() const { return rest_subsystems_; }

    /// Calls fn(base_offset, rest_index) for every assignment of the
    /// non-target digits, rest_index counting row-major from zero.
    template <class Fn>
    void for_each_base(Fn &&fn) const {
        const std::size_t r = rest_dims_.size();
        std::vector<std::size_t> digit(r, 0);
        std::size_t base = 0;
        for (std::size_t idx = 0; idx < rest_size_; ++idx) {
            fn(base, idx);
            for (std::size_t j = r; j-- > 0;) {
                base += rest_strides_[j];
                if (++digit[j] < rest_dims_[j]) {
                    break;
                }
                base -= digit[j] * rest_strides_[j];
                digit[j] = 0;
            }
        }
    }

    /// Like for_each_base, but batches the innermost rest axis when it is
    /// contiguous: calls fn(base_offset, rest_index, run_length) where the
    /// run covers offsets base_offset .. base_offset + run_length - 1.
    template <class Fn>
    void for_each_run(Fn &&fn) const {
        const std::size_t r = rest_dims_.size();
        if (r == 0 || rest_strides_[r - 1] != 1) {
            for_each_base([&](std::size_t base, std::size_t idx) { fn(base, idx, std::size_t{1}); });
            return;
        }
        const std::size_t run = rest_dims_[r - 1];
        std::vector<std::size_t> digit(r - 1, 0);
        std::size_t base = 0;
        for (std::size_t idx = 0; idx < rest_size_; idx += run) {
            fn(base, idx, run);
            for (std::size_t j = r - 1; j-- > 0;) {
                base += rest_strides_[j];
                if (++digit[j] < rest_dims_[j]) {
                    break;
                }
                base -= digit[j] * rest_strides_[j];
                digit[j] = 0;
            }
        }
    }

  private:
    std::size_t target_size_ = 1;
    std::size_t rest_size_ = 1;
    std::vector<std::size_t> target_offsets_;
    std::vector<std::size_t> rest_dims_;
    std::vector<std::size_t> rest_strides_;
    std::vector<std::size_t> rest_subsystems_;
};

}  // namespace weakclone::detail
