#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "levysde/errors.hpp"
#include "levysde/version.hpp"

namespace levysde {

// Shortest round-trip decimal representation of a double; parsing it back
// recovers the exact bits, so files are byte-stable across reruns.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    // Prefer the shorter %.15g / %.16g form when it round-trips.
    for (int prec = 15; prec <= 16; ++prec) {
        char shorter[32];
        std::snprintf(shorter, sizeof shorter, "%.*g", prec, x);
        double back;
        std::sscanf(shorter, "%lf", &back);
        if (back == x) return shorter;
    }
    return buf;
}

// Line-oriented CSV writer: '#'-prefixed provenance comments, one header
// row, then data rows. All numbers go through format_double.
class CsvWriter {
  public:
    explicit CsvWriter(const std::filesystem::path& file) : out_(file) {
        if (!out_) throw UsageError("cannot open output file: " + file.string());
    }

    void comment(const std::string& text) { out_ << "# " << text << "\n"; }

    // Embeds the effective configuration, one comment line per JSON line.
    void provenance(const std::string& command, const nlohmann::json& config) {
        comment(std::string("levysde ") + kVersion);
        comment("command: " + command);
        comment("config: " + config.dump());
    }

    void header(const std::vector<std::string>& columns) { row_strings(columns); }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << format_double(values[i]);
        }
        out_ << '\n';
    }

    void row_strings(const std::vector<std::string>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << values[i];
        }
        out_ << '\n';
    }

  private:
    std::ofstream out_;
};

}  // namespace levysde
