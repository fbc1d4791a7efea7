#pragma once

#include "mycosim/common.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mycosim {

std::string_view tool_version();

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

struct FileDigest {
    std::string path;
    std::string sha256;

    friend bool operator==(const FileDigest&, const FileDigest&) = default;
};

/**
 * Provenance record written as `<output>.manifest`:
 *
 *     myceliumsim/manifest/v1
 *     tool_version 0.1.0
 *     timestamp 2026-01-01T00:00:00Z
 *     command grow --field f.txt ...
 *     seed 7
 *     input <sha256> <path>
 *     output <sha256> <path>
 *
 * The timestamp honours SOURCE_DATE_EPOCH when it is set.
 */
struct RunManifest {
    std::string tool_version;
    std::string timestamp;
    std::vector<std::string> command;
    std::vector<std::uint64_t> seeds;
    std::vector<FileDigest> inputs;
    std::vector<FileDigest> outputs;

    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

std::string utc_timestamp();

/// Digests every listed file now; throws FileError if one cannot be read.
RunManifest make_manifest(const std::vector<std::string>& command, const std::vector<std::uint64_t>& seeds,
                          const std::vector<std::filesystem::path>& inputs,
                          const std::vector<std::filesystem::path>& outputs);

std::string format_manifest(const RunManifest& manifest);
RunManifest parse_manifest(const std::string& text);
RunManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const RunManifest& manifest, const std::filesystem::path& path);

/// Paths whose current digest differs from the recorded one (or that are missing).
std::vector<std::string> verify_manifest(const RunManifest& manifest);

}  // namespace mycosim
