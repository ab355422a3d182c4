// latrescore/latrescore.hpp

// Copyright 2026  The latrescore Authors

// See ../../LICENSE for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "latrescore/bench.hpp"
#include "latrescore/cover.hpp"
#include "latrescore/errors.hpp"
#include "latrescore/exec_scorer.hpp"
#include "latrescore/expand.hpp"
#include "latrescore/generate.hpp"
#include "latrescore/lattice.hpp"
#include "latrescore/metrics.hpp"
#include "latrescore/paths.hpp"
#include "latrescore/pipeline.hpp"
#include "latrescore/score.hpp"
#include "latrescore/scorer.hpp"
#include "latrescore/scorer_spec.hpp"
#include "latrescore/text_format.hpp"
#include "latrescore/viterbi.hpp"
