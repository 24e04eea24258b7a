#pragma once

#include "json.hpp"
#include <filesystem>
#include <string>
#include <vector>

namespace renoise {

struct Table {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

// Shortest round-trip decimal form of a double.
std::string fmt(double v);
std::string fmt(long long v);

// RFC 4180: quote fields containing comma, quote, CR or LF; double embedded quotes.
std::string csv_field(const std::string& s);
std::string to_csv(const Table& t);

void write_text(const std::filesystem::path& p, const std::string& text);
void write_csv(const std::filesystem::path& dir, const Table& t);
// Pretty-printed with two-space indent; object keys are sorted.
void write_json(const std::filesystem::path& p, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& p);

// JSON number or null for non-finite values.
nlohmann::json num(double v);
nlohmann::json nums(const std::vector<double>& v);

} // namespace renoise
