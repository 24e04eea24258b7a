#include "renoise/io.hpp"
#include "renoise/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace renoise {

std::string fmt(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string fmt(long long v) { return std::to_string(v); }

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string to_csv(const Table& t)
{
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(r[i]);
        os << "\r\n";
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return os.str();
}

void write_text(const std::filesystem::path& p, const std::string& text)
{
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorKind::Config, "cannot write " + p.string());
    f << text;
}

void write_csv(const std::filesystem::path& dir, const Table& t) { write_text(dir / (t.name + ".csv"), to_csv(t)); }

void write_json(const std::filesystem::path& p, const nlohmann::json& j) { write_text(p, j.dump(2) + "\n"); }

nlohmann::json read_json(const std::filesystem::path& p)
{
    std::ifstream f(p);
    if (!f) throw Error(ErrorKind::MissingManifest, "cannot read " + p.string());
    return nlohmann::json::parse(f);
}

nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json nums(const std::vector<double>& v)
{
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

} // namespace renoise
