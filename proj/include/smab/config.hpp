#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "smab/engine.hpp"

namespace smab {

// Flat "key = value" configuration line, '#' comments, UTF-8, LF. The same
// grammar is emitted by the run manifest, so a manifest can be fed back as a
// config and reproduces the run.
struct KvEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct KvFile {
    std::string source;  // file name used in diagnostics
    std::vector<KvEntry> entries;

    const KvEntry* find(const std::string& key) const;
    void set(const std::string& key, const std::string& value);  // replace or append
};

KvFile parse_kv(std::istream& in, const std::string& source);
KvFile parse_kv_file(const std::string& path);

// A full run request: the base simulation plus optional replication, a tau
// sweep, or a deviation audit.
struct RunSpec {
    SimConfig base;
    int replicas = 1;
    std::vector<int> sweep_taus;
    std::optional<int> deviation_arm;
    std::vector<DeviationMode> deviation_modes;
};

// Expands defaults and validates. Unknown keys (except the ignored meta.*
// namespace) and malformed values raise errors carrying "source:line".
RunSpec resolve_run_spec(const KvFile& kv);

// Canonical serialization with every default expanded; parse_kv followed by
// resolve_run_spec round-trips to the same resolved spec.
std::string serialize_run_spec(const RunSpec& spec);

}  // namespace smab
