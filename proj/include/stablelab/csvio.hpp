#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "stablelab/errors.hpp"

namespace stablelab {

/// RFC-4180 CSV writer. Numeric cells are rendered with %.17g so re-running a
/// manifest reproduces byte-identical columns. Lines starting with '#' before
/// the header carry provenance.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw usage_error("cannot open for writing: " + path);
    }

    void comment(const std::string& line) { out_ << "# " << line << "\n"; }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << quote(cells[i]);
        }
        out_ << "\r\n";
    }

    static std::string num(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += "\"\"";
            else q += c;
        }
        q += "\"";
        return q;
    }

private:
    std::ofstream out_;
};

}  // namespace stablelab
