#include "astref/source.hpp"

#include "astref/error.hpp"

#include <openssl/evp.h>

#include <memory>

namespace astref {

std::string normalize_source(std::string_view body) {
    std::string out;
    bool pending_blank = false;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        std::size_t eol = body.find('\n', pos);
        if (eol == std::string_view::npos) eol = body.size();
        std::string_view line = body.substr(pos, eol - pos);
        pos = eol + 1;
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            pending_blank = !out.empty();
            continue;
        }
        if (pending_blank) out += '\n';
        pending_blank = false;
        out.append(line);
        out += '\n';
    }
    return out;
}

Digest md5(std::string_view bytes) {
    Digest d{};
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_md5(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), d.data(), &len) != 1 || len != d.size()) {
        throw Error("md5 digest failed");
    }
    return d;
}

std::string to_hex(const Digest& d) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s;
    s.reserve(32);
    for (auto b : d) {
        s += kHex[b >> 4];
        s += kHex[b & 0xF];
    }
    return s;
}

Digest digest_from_hex(std::string_view hex) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    Digest d{};
    if (hex.size() != 32) throw SchemaError("digest must be 32 hex characters");
    for (std::size_t i = 0; i < 16; ++i) {
        const int hi = nibble(hex[2 * i]);
        const int lo = nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw SchemaError("digest has a non-hex character");
        d[i] = static_cast<std::uint8_t>(hi << 4 | lo);
    }
    return d;
}

SourceUnit SourceUnit::make(std::string path, std::string body) {
    SourceUnit u{std::move(path), std::move(body), {}};
    u.digest = md5(normalize_source(u.body));
    return u;
}

} // namespace astref
