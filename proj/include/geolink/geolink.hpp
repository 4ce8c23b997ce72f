// Copyright 2026 The geolink Authors
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

#pragma once

#include "geolink/candidates.hpp"
#include "geolink/error.hpp"
#include "geolink/index.hpp"
#include "geolink/kde.hpp"
#include "geolink/linkage.hpp"
#include "geolink/model.hpp"
#include "geolink/outlier.hpp"
#include "geolink/parallel.hpp"
#include "geolink/predict.hpp"
#include "geolink/report.hpp"
#include "geolink/synth.hpp"
#include "geolink/weights.hpp"
