#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "latlab/errors.hpp"

namespace latlab {

/// Minimal RFC-4180 writer with a canonical number format, so identical data
/// produces byte-identical files.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw Error("CsvWriter: cannot open " + path);
    }

    static std::string format_number(double x) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        return buf;
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << quoted(fields[i]);
        }
        out_ << "\r\n";
    }

private:
    static std::string quoted(const std::string& f) {
        if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
        std::string q = "\"";
        for (const char c : f) {
            if (c == '"') q += "\"\"";
            else q += c;
        }
        q += '"';
        return q;
    }

    std::ofstream out_;
};

} // namespace latlab
