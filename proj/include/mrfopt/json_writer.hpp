// Copyright 2026 The mrfopt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Deterministic JSON text: sorted keys, doubles with 17 significant digits,
// non-finite numbers written as null.

#ifndef MRFOPT_JSON_WRITER_HPP_
#define MRFOPT_JSON_WRITER_HPP_

#include <string>

#include "json.hpp"

namespace mrfopt {

// Renders a double as "%.17g", or "null" when it is not finite.
std::string format_number(double x);

// indent < 0 writes everything on one line.
std::string write_json(const nlohmann::json& j, int indent = 2);

}  // namespace mrfopt

#endif  // MRFOPT_JSON_WRITER_HPP_
