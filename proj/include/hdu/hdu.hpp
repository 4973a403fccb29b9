// Copyright 2026 The hdu Authors.
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

#ifndef HDU_HDU_HPP
#define HDU_HDU_HPP

#include "hdu/channels.hpp"
#include "hdu/circuit_layout.hpp"
#include "hdu/entanglement_engine.hpp"
#include "hdu/errors.hpp"
#include "hdu/exact_formulas.hpp"
#include "hdu/gates.hpp"
#include "hdu/numerics.hpp"
#include "hdu/rng.hpp"
#include "hdu/statevec_oracle.hpp"
#include "hdu/ueb.hpp"

#endif
