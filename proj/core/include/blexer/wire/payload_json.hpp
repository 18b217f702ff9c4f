#pragma once

// JSON mapping for every payload type. The parse functions validate shape
// and ranges and throw Error{SchemaViolation} naming the offending field;
// unknown fields are ignored (directives keep them as extensions).

#include <string>

#include <nlohmann/json.hpp>

#include "blexer/wire/envelope.hpp"

namespace blexer::wire {

using nlohmann::json;

json to_json(const HelloMsg& m);
json to_json(const AckMsg& m);
json to_json(const EcgMsg& m);
json to_json(const PpgMsg& m);
json to_json(const SkelAffectMsg& m);
json to_json(const cam::Directive& d);
json to_json(const ipm::PerformanceReport& r);
json to_json(const iam::OverrideCommand& c);
json to_json(const iam::Alert& a);
json to_json(const HeartbeatMsg& m);
json to_json(const ByeMsg& m);

json payload_to_json(const Payload& p);

// `path` prefixes field names in error messages (e.g. "payload").
HelloMsg hello_from_json(const json& j, const std::string& path = "payload");
AckMsg ack_from_json(const json& j, const std::string& path = "payload");
EcgMsg ecg_from_json(const json& j, const std::string& path = "payload");
PpgMsg ppg_from_json(const json& j, const std::string& path = "payload");
SkelAffectMsg skel_affect_from_json(const json& j, const std::string& path = "payload");
cam::Directive directive_from_json(const json& j, const std::string& path = "payload");
ipm::PerformanceReport report_from_json(const json& j, const std::string& path = "payload");
iam::OverrideCommand override_from_json(const json& j, const std::string& path = "payload");
iam::Alert alert_from_json(const json& j, const std::string& path = "payload");

Payload payload_from_json(MsgType type, const json& j, const std::string& path = "payload");

}  // namespace blexer::wire
