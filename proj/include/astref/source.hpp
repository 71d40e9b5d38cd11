#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace astref {

using Digest = std::array<std::uint8_t, 16>;

/// Strips trailing whitespace per line, collapses runs of blank lines into
/// one, drops leading/trailing blank lines; non-empty results end in '\n'.
std::string normalize_source(std::string_view body);

Digest md5(std::string_view bytes);
std::string to_hex(const Digest& d);
Digest digest_from_hex(std::string_view hex);

struct SourceUnit {
    std::string path;
    std::string body;
    Digest digest{};

    static SourceUnit make(std::string path, std::string body);
};

} // namespace astref
