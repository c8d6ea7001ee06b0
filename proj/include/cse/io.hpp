#pragma once

// Small CSV writer shared by all export paths. Doubles are written in the
// shortest form that round-trips, so identical inputs give identical bytes.

#include <charconv>
#include <concepts>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>

#include "cse/errors.hpp"

namespace cse {

inline std::string format_number(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <std::integral T>
inline std::string format_number(T v)
{
    return std::to_string(v);
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
        : out_(path)
    {
        if (!out_)
            throw IoError("cannot open " + path.string() + " for writing");
        bool first = true;
        for (auto h : header) {
            if (!first)
                out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }

    template <typename... Ts>
    void row(const Ts&... values)
    {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(values), first = false), ...);
        out_ << '\n';
        if (!out_)
            throw IoError("write failed");
    }

private:
    std::ofstream out_;

    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(bool b) { return b ? "1" : "0"; }
    template <typename T>
        requires std::is_arithmetic_v<T>
    static std::string cell(T v)
    {
        return format_number(v);
    }
};

}  // namespace cse
