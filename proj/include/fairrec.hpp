// Copyright 2026 The FairRec Authors.
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

#include "fairrec/common.hpp"
#include "fairrec/dataset.hpp"
#include "fairrec/disentangle.hpp"
#include "fairrec/experiment.hpp"
#include "fairrec/graph.hpp"
#include "fairrec/losses.hpp"
#include "fairrec/metrics.hpp"
#include "fairrec/optimizer.hpp"
#include "fairrec/propagation.hpp"
#include "fairrec/synthetic.hpp"
#include "fairrec/training.hpp"
