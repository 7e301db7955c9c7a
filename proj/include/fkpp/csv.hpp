#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "fkpp/errors.hpp"

namespace fkpp {

/// Deterministic float formatting: 17 significant digits, locale-free.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Tiny deterministic CSV emitter (fixed header, stable row order,
/// fmt17 for every numeric field).
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& header) : out_(path) {
        if (!out_) throw Error("cannot open " + path + " for writing");
        out_ << header << '\n';
    }

    void row(std::initializer_list<std::string> fields) {
        bool first = true;
        for (const auto& f : fields) {
            if (!first) out_ << ',';
            out_ << f;
            first = false;
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

}  // namespace fkpp
