#ifndef STROUT_UTF8_HPP
#define STROUT_UTF8_HPP

#include <string>
#include <string_view>

#include "strout/errors.hpp"

namespace strout::utf8 {

// Strings are compared by code point; everything internal is UTF-32.

inline std::u32string decode(std::string_view in) {
    std::u32string out;
    out.reserve(in.size());
    std::size_t i = 0;
    while (i < in.size()) {
        const auto b0 = static_cast<unsigned char>(in[i]);
        char32_t cp = 0;
        std::size_t len = 0;
        if (b0 < 0x80) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        } else {
            throw ConfigError("invalid UTF-8 lead byte at offset " + std::to_string(i));
        }
        if (i + len > in.size()) {
            throw ConfigError("truncated UTF-8 sequence at offset " + std::to_string(i));
        }
        for (std::size_t k = 1; k < len; ++k) {
            const auto b = static_cast<unsigned char>(in[i + k]);
            if ((b & 0xC0) != 0x80) {
                throw ConfigError("invalid UTF-8 continuation byte at offset " +
                                  std::to_string(i + k));
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline void append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string encode(std::u32string_view in) {
    std::string out;
    out.reserve(in.size());
    for (char32_t cp : in) append(out, cp);
    return out;
}

inline std::string encode(char32_t cp) {
    std::string out;
    append(out, cp);
    return out;
}

}  // namespace strout::utf8

#endif  // STROUT_UTF8_HPP
