#include "blexer/simkit/replay.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <thread>

#include "blexer/cam/config_io.hpp"
#include "blexer/common/error.hpp"
#include "blexer/iam/recorder.hpp"
#include "blexer/ingest/session.hpp"
#include "blexer/runtime/engine.hpp"
#include "blexer/wire/payload_json.hpp"

namespace blexer::simkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string where(LogStream s, std::size_t line) {
  return std::string(file_name(s)) + ":" + std::to_string(line);
}

template <class Fn>
void for_each_record(const fs::path& dir, LogStream stream, Fn&& fn) {
  std::ifstream in(dir / std::string(file_name(stream)));
  if (!in) return;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(Errc::CorruptLog, where(stream, line), e.what());
    }
    if (!j.is_object()) throw Error(Errc::CorruptLog, where(stream, line), "expected an object");
    fn(std::move(j), line);
  }
}

}  // namespace

std::vector<LoggedInput> read_inputs(const fs::path& dir) {
  std::vector<LoggedInput> out;
  for (auto stream : {LogStream::Raw, LogStream::Reports, LogStream::Overrides}) {
    for_each_record(dir, stream, [&](json j, std::size_t line) {
      LoggedInput in;
      in.stream = stream;
      in.line = line;
      try {
        in.ord = j.at("ord").get<std::uint64_t>();
        in.at = j.at("at").get<TimeMs>();
      } catch (const json::exception& e) {
        throw Error(Errc::CorruptLog, where(stream, line), e.what());
      }
      in.record = std::move(j);
      out.push_back(std::move(in));
    });
  }
  std::sort(out.begin(), out.end(),
            [](const LoggedInput& a, const LoggedInput& b) { return a.ord < b.ord; });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].ord == out[i - 1].ord)
      throw Error(Errc::CorruptLog, where(out[i].stream, out[i].line),
                  "duplicate ord " + std::to_string(out[i].ord));
  return out;
}

std::vector<cam::Directive> read_directives(const fs::path& dir) {
  std::vector<cam::Directive> out;
  for_each_record(dir, LogStream::Directives, [&](json j, std::size_t line) {
    try {
      out.push_back(wire::directive_from_json(j, "directive"));
    } catch (const Error& e) {
      throw Error(Errc::CorruptLog, where(LogStream::Directives, line), e.what());
    }
  });
  return out;
}

ReplayResult replay_session(const fs::path& dir, const ReplayOptions& options) {
  ReplayResult result;
  const std::vector<LoggedInput> inputs = read_inputs(dir);
  const json meta = iam::read_session_meta(dir);
  if (meta.is_null()) {
    if (!inputs.empty())
      throw Error(Errc::CorruptLog, std::string(iam::kSessionMetaFile) + ":0", "missing");
    result.empty = true;
    result.directive_hash = runtime::directive_sequence_hash({});
    return result;
  }

  runtime::EngineConfig config;
  TimeMs start = 0;
  std::optional<TimeMs> ended;
  try {
    config.session_id = meta.at("session_id").get<std::string>();
    start = meta.at("started_at").get<TimeMs>();
    config.plan = cam::plan_from_json(meta.at("plan"));
    config.rules = cam::rule_config_from_json(meta.at("rules"));
    if (meta.contains("ended_at") && !meta.at("ended_at").is_null())
      ended = meta.at("ended_at").get<TimeMs>();
  } catch (const std::exception& e) {
    throw Error(Errc::CorruptLog, std::string(iam::kSessionMetaFile) + ":1", e.what());
  }

  runtime::Engine engine(config, start, options.sink);
  runtime::EngineHooks hooks;
  hooks.directive = [&](const cam::Directive& d) { result.directives.push_back(d); };
  engine.set_hooks(hooks);
  engine.start();

  using clock = std::chrono::steady_clock;
  const auto wall0 = clock::now();
  for (const auto& in : inputs) {
    if (options.speed > 0.0) {
      const auto due = wall0 + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double, std::milli>(
                                   static_cast<double>(in.at - start) / options.speed));
      std::this_thread::sleep_until(due);
    }
    engine.advance_to(in.at);
    try {
      switch (in.stream) {
        case LogStream::Raw: {
          auto sample = ingest::sample_from_json(in.record);
          if (!sample) throw Error(Errc::CorruptLog, where(in.stream, in.line), "not a sample");
          engine.ingest(*sample);
          break;
        }
        case LogStream::Reports:
          engine.on_report(wire::report_from_json(in.record, "report"), in.at);
          break;
        case LogStream::Overrides: {
          const std::string type = in.record.at("type").get<std::string>();
          if (type == "override")
            engine.apply_override(wire::override_from_json(in.record.at("command"), "command"), in.at);
          else if (type == "plan")
            engine.set_plan(cam::plan_from_json(in.record.at("plan")), in.at);
          else if (type == "rules")
            engine.set_rules(cam::rule_config_from_json(in.record.at("rules")), in.at);
          else
            throw Error(Errc::CorruptLog, where(in.stream, in.line), "unknown type '" + type + "'");
          break;
        }
        default:
          break;
      }
    } catch (const Error& e) {
      if (e.code() == Errc::CorruptLog) throw;
      throw Error(Errc::CorruptLog, where(in.stream, in.line), e.what());
    } catch (const json::exception& e) {
      throw Error(Errc::CorruptLog, where(in.stream, in.line), e.what());
    }
    ++result.inputs;
  }

  const TimeMs end = ended.value_or(inputs.empty() ? start : inputs.back().at);
  engine.close(end);
  result.ended_at = end;
  result.directive_hash = runtime::directive_sequence_hash(result.directives);
  return result;
}

}  // namespace blexer::simkit
