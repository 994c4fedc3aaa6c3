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

#include "weakclone/error.hpp"

namespace weakclone {

const char *errc_name(Errc code) {
    switch (code) {
        case Errc::dimension: return "dimension";
        case Errc::shape: return "shape";
        case Errc::index_out_of_range: return "index_out_of_range";
        case Errc::non_hermitian: return "non_hermitian";
        case Errc::capacity: return "capacity";
        case Errc::grid_too_small: return "grid_too_small";
        case Errc::bandwidth: return "bandwidth";
        case Errc::leakage: return "leakage";
        case Errc::vanishing_overlap: return "vanishing_overlap";
        case Errc::zero_weight: return "zero_weight";
        case Errc::pointer_count: return "pointer_count";
        case Errc::representation: return "representation";
        case Errc::degenerate_fit: return "degenerate_fit";
        case Errc::config: return "config";
    }
    return "unknown";
}

bool is_input_error(Errc code) {
    switch (code) {
        case Errc::dimension:
        case Errc::shape:
        case Errc::index_out_of_range:
        case Errc::non_hermitian:
        case Errc::config:
            return true;
        default:
            return false;
    }
}

Error::Error(Errc code, const std::string &what)
    : std::runtime_error(std::string(errc_name(code)) + " error: " + what), code_(code) {}

}  // namespace weakclone
