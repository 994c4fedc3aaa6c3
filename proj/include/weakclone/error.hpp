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

#include <stdexcept>
#include <string>

namespace weakclone {

enum class Errc {
    dimension,
    shape,
    index_out_of_range,
    non_hermitian,
    capacity,
    grid_too_small,
    bandwidth,
    leakage,
    vanishing_overlap,
    zero_weight,
    pointer_count,
    representation,
    degenerate_fit,
    config,
};

const char *errc_name(Errc code);

/// True for errors caused by malformed input (as opposed to a numerical
/// precondition that a well-formed configuration failed to meet).
bool is_input_error(Errc code);

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string &what);
    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

}  // namespace weakclone
