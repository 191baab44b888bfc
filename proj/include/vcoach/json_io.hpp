/*
 * Copyright 2026 The vcoach Authors
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

#pragma once

#include <json.hpp>

#include "vcoach/coach.hpp"
#include "vcoach/cues.hpp"
#include "vcoach/geometry.hpp"
#include "vcoach/metrics.hpp"
#include "vcoach/record.hpp"
#include "vcoach/task.hpp"
#include "vcoach/tpm.hpp"

// Structured-text encodings shared by session files, the wire protocol and
// config files. Decoders throw Error(InvalidArgument) on schema violations.
namespace vcoach::io {

using Json = nlohmann::json;

Json to_json(const geometry::Vec3& v);
Json to_json(const geometry::UnitQuat& q);
Json to_json(const geometry::Pose& p);
Json to_json(const geometry::ArcPath& a);
Json to_json(const task::TaskConfig& c);
Json to_json(const coach::ThresholdTable& t);
Json to_json(const task::InstrumentCommand& c);
Json to_json(const cues::CueSet& s);
Json to_json(const metrics::TaskMetrics& m);
Json to_json(const metrics::SegmentMetrics& m);
Json to_json(const cues::CueDescriptor& d);
// {"t", "kind", "payload"}
Json to_json(const LoggedEvent& e);

geometry::Vec3 vec3_from_json(const Json& j);
geometry::UnitQuat quat_from_json(const Json& j);
geometry::Pose pose_from_json(const Json& j);
geometry::ArcPath arc_from_json(const Json& j);
// Missing keys keep their defaults; the result is validated.
task::TaskConfig task_config_from_json(const Json& j);
coach::ThresholdTable thresholds_from_json(const Json& j);
task::InstrumentCommand command_from_json(const Json& j);
cues::CueSet cue_set_from_json(const Json& j);
metrics::TaskMetrics task_metrics_from_json(const Json& j);
LoggedEvent event_from_json(const Json& j);

// Small typed accessors with schema errors.
const Json& require(const Json& j, const char* key);
double require_number(const Json& j, const char* key);
int64_t require_int(const Json& j, const char* key);
std::string require_string(const Json& j, const char* key);

}  // namespace vcoach::io
