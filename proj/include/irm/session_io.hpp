#pragma once

#include <string>

#include <json.hpp>

#include "irm/engine.hpp"

namespace irm {

inline constexpr int kSessionSchemaVersion = 1;
/// Bumped whenever a change could alter the displays or pruning of a replayed session.
inline constexpr const char* kEngineVersion = "irm-engine/1.0";

/// 64-bit FNV-1a over n, d and the coordinate bits.
std::string dataset_fingerprint(const Dataset& ds);

nlohmann::json response_to_json(const Response& r);
Response response_from_json(const nlohmann::json& j);

/// The persisted form of a session. Wall times are left out so that two runs
/// with the same inputs serialize identically. With embed_dataset the
/// document also carries the dataset and can be replayed on its own.
nlohmann::json session_document(const Session& session, bool embed_dataset = false);

/// Re-applies the recorded feedback to a fresh session and checks every round
/// against the record. Errors: VersionMismatch for another schema or engine
/// version, CorruptRecord (naming the round) when the record is incomplete or
/// disagrees with the recomputation, InvalidArgument for the wrong dataset.
Session replay(const nlohmann::json& document, std::shared_ptr<const Dataset> dataset);
/// Same, using the embedded dataset.
Session replay(const nlohmann::json& document);

/// Parses a session file. A truncated or malformed file raises CorruptRecord
/// naming the last round that started before the damage.
nlohmann::json parse_session_text(const std::string& text);

void write_session(const Session& session, const std::string& path, bool embed_dataset = true);
nlohmann::json read_session_file(const std::string& path);

}  // namespace irm
