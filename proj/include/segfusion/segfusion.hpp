/* Copyright 2026 The segfusion Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SEGFUSION_SEGFUSION_HPP_
#define SEGFUSION_SEGFUSION_HPP_

#include "segfusion/bench.hpp"
#include "segfusion/core.hpp"
#include "segfusion/dataset.hpp"
#include "segfusion/fusion.hpp"
#include "segfusion/kmodes.hpp"
#include "segfusion/label_image.hpp"
#include "segfusion/metrics.hpp"
#include "segfusion/seg_format.hpp"

#endif  // SEGFUSION_SEGFUSION_HPP_
