// Copyright 2022-2024  atcdp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ATCDP_ATCDP_HPP
#define ATCDP_ATCDP_HPP

#include "atcdp/annotation.hpp"
#include "atcdp/callsign.hpp"
#include "atcdp/cnet.hpp"
#include "atcdp/eld.hpp"
#include "atcdp/entity.hpp"
#include "atcdp/error.hpp"
#include "atcdp/icao.hpp"
#include "atcdp/job_settings.hpp"
#include "atcdp/lexicon.hpp"
#include "atcdp/metrics.hpp"
#include "atcdp/pipeline.hpp"
#include "atcdp/quality.hpp"
#include "atcdp/rttm.hpp"
#include "atcdp/signal.hpp"
#include "atcdp/tagger.hpp"
#include "atcdp/textnorm.hpp"
#include "atcdp/wave.hpp"

#endif  // ATCDP_ATCDP_HPP
