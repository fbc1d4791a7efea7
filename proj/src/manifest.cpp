#include "mycosim/manifest.hpp"

#include "text_util.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <memory>

#ifndef MYCOSIM_VERSION
#define MYCOSIM_VERSION "0.0.0"
#endif

namespace mycosim {

std::string_view tool_version() { return MYCOSIM_VERSION; }

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(detail::read_file(path)); }

std::string utc_timestamp() {
    std::time_t now = 0;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    }
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

RunManifest make_manifest(const std::vector<std::string>& command, const std::vector<std::uint64_t>& seeds,
                          const std::vector<std::filesystem::path>& inputs,
                          const std::vector<std::filesystem::path>& outputs) {
    RunManifest m;
    m.tool_version = std::string(tool_version());
    m.timestamp = utc_timestamp();
    m.command = command;
    m.seeds = seeds;
    for (const auto& p : inputs) m.inputs.push_back({p.string(), sha256_file(p)});
    for (const auto& p : outputs) m.outputs.push_back({p.string(), sha256_file(p)});
    return m;
}

namespace {

std::string quote(const std::string& arg) {
    if (!arg.empty() && arg.find_first_of(" \t\"'\\") == std::string::npos) return arg;
    std::string out = "'";
    for (char c : arg) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    return out + "'";
}

}  // namespace

std::string format_manifest(const RunManifest& m) {
    std::string out = "myceliumsim/manifest/v1\n";
    out += "tool_version " + m.tool_version + "\n";
    out += "timestamp " + m.timestamp + "\n";
    out += "command";
    for (const auto& a : m.command) out += " " + quote(a);
    out += "\n";
    for (auto s : m.seeds) out += "seed " + std::to_string(s) + "\n";
    for (const auto& d : m.inputs) out += "input " + d.sha256 + " " + d.path + "\n";
    for (const auto& d : m.outputs) out += "output " + d.sha256 + " " + d.path + "\n";
    return out;
}

RunManifest parse_manifest(const std::string& text) {
    const auto lines = detail::content_lines(text, false);
    if (lines.empty() || lines[0].text != "myceliumsim/manifest/v1") {
        throw ParseError(lines.empty() ? 1 : lines[0].number, "header", "expected myceliumsim/manifest/v1");
    }
    RunManifest m;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string_view line = lines[i].text;
        const auto sp = line.find(' ');
        const auto key = line.substr(0, sp);
        const auto rest = sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1);
        if (key == "tool_version") {
            m.tool_version = rest;
        } else if (key == "timestamp") {
            m.timestamp = rest;
        } else if (key == "command") {
            // Round trip is only needed for display; keep the raw words.
            for (auto w : detail::split_ws(rest)) m.command.emplace_back(w);
        } else if (key == "seed") {
            m.seeds.push_back(detail::parse_u64(rest, lines[i].number, "seed"));
        } else if (key == "input" || key == "output") {
            const auto sp2 = rest.find(' ');
            if (sp2 != 64) throw ParseError(lines[i].number, std::string(key), "expected '<sha256> <path>'");
            FileDigest d{std::string(rest.substr(65)), std::string(rest.substr(0, 64))};
            (key == "input" ? m.inputs : m.outputs).push_back(std::move(d));
        } else {
            throw ParseError(lines[i].number, std::string(key), "unknown manifest entry");
        }
    }
    return m;
}

RunManifest load_manifest(const std::filesystem::path& path) { return parse_manifest(detail::read_file(path)); }

void save_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
    detail::write_file(path, format_manifest(manifest));
}

std::vector<std::string> verify_manifest(const RunManifest& manifest) {
    std::vector<std::string> bad;
    for (const auto* list : {&manifest.inputs, &manifest.outputs}) {
        for (const auto& d : *list) {
            try {
                if (sha256_file(d.path) != d.sha256) bad.push_back(d.path);
            } catch (const FileError&) {
                bad.push_back(d.path);
            }
        }
    }
    return bad;
}

}  // namespace mycosim
