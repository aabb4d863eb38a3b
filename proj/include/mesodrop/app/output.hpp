#pragma once

// Deterministic artifact writers. Numbers use the shortest round-trip decimal form, so
// identical inputs give byte-identical files.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mesodrop/error.hpp"

namespace mesodrop::app {

using json = nlohmann::ordered_json;

inline std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// {"value": x, "unit": u}; non-finite values become null.
inline json quantity(double value, const std::string& unit)
{
    json q;
    q["value"] = std::isfinite(value) ? json(value) : json(nullptr);
    q["unit"] = unit;
    return q;
}

/// Measured quantity next to a published reference value and the relative deviation.
inline json compared(double value, double reference, const std::string& unit, const std::string& source)
{
    json q = quantity(value, unit);
    q["reference"] = quantity(reference, unit);
    q["reference"]["source"] = source;
    const double dev = reference != 0.0 ? (value - reference) / std::abs(reference) : std::nan("");
    q["relative_deviation"] = std::isfinite(dev) ? json(dev) : json(nullptr);
    return q;
}

struct CsvColumn {
    std::string name;  // "quantity_unit"
    std::vector<double> values;
};

class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir))
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw ConfigError("cannot create output directory '" + dir_.string() + "': " + ec.message());
    }

    [[nodiscard]] const std::filesystem::path& directory() const { return dir_; }
    [[nodiscard]] const std::vector<std::string>& written() const { return written_; }

    void write_json(const std::string& name, const json& j)
    {
        write_text(name, j.dump(2) + "\n");
    }

    /// Header row of column names, one row per sample; `comment` lines precede it with '#'.
    void write_csv(const std::string& name, const std::vector<CsvColumn>& cols,
                   const std::vector<std::string>& comment = {})
    {
        if (cols.empty()) throw NumericError("csv '" + name + "' has no columns");
        const std::size_t rows = cols.front().values.size();
        for (const auto& c : cols) {
            if (c.values.size() != rows) throw NumericError("csv '" + name + "' has ragged columns");
        }
        std::string out;
        for (const auto& line : comment) out += "# " + line + "\n";
        for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i].name;
        out += "\n";
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t i = 0; i < cols.size(); ++i) {
                if (i) out += ",";
                out += format_number(cols[i].values[r]);
            }
            out += "\n";
        }
        write_text(name, out);
    }

    void write_text(const std::string& name, const std::string& text)
    {
        const auto path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write '" + path.string() + "'");
        out << text;
        if (!out) throw ConfigError("failed writing '" + path.string() + "'");
        written_.push_back(name);
    }

private:
    std::filesystem::path dir_;
    std::vector<std::string> written_;
};

} // namespace mesodrop::app
