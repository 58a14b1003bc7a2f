/*
 * Copyright (c) 2026, The threatflow authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#ifndef THREATFLOW_THREATFLOW_HPP_
#define THREATFLOW_THREATFLOW_HPP_

#include "threatflow/catalog.hpp"
#include "threatflow/cloud.hpp"
#include "threatflow/dot.hpp"
#include "threatflow/engine.hpp"
#include "threatflow/error.hpp"
#include "threatflow/explore.hpp"
#include "threatflow/expr.hpp"
#include "threatflow/flatten.hpp"
#include "threatflow/ingest.hpp"
#include "threatflow/json.hpp"
#include "threatflow/marking.hpp"
#include "threatflow/net.hpp"
#include "threatflow/net_io.hpp"
#include "threatflow/paths.hpp"
#include "threatflow/scenario.hpp"
#include "threatflow/threat.hpp"
#include "threatflow/value.hpp"

#endif  // THREATFLOW_THREATFLOW_HPP_
