// Copyright 2026 The asrkit Authors
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

// Umbrella header.

#pragma once

#include "asrkit/alignment.hpp"
#include "asrkit/audio_io.hpp"
#include "asrkit/benchgen.hpp"
#include "asrkit/bestrq.hpp"
#include "asrkit/error.hpp"
#include "asrkit/feature_file.hpp"
#include "asrkit/halluc.hpp"
#include "asrkit/matrix.hpp"
#include "asrkit/pipeline.hpp"
#include "asrkit/rnnt_check.hpp"
#include "asrkit/transducer.hpp"
#include "asrkit/ts_eval.hpp"
#include "asrkit/vad_segment.hpp"
