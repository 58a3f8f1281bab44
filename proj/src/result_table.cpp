#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "greens/experiments.hpp"
#include "json.hpp"

namespace greens {

namespace {

std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw std::runtime_error("not a number: '" + s + "'");
    return v;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos && !s.empty()) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// "# key: value" with escaped newlines
std::string meta_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\\') out += "\\\\";
        else if (c == '\n') out += "\\n";
        else out += c;
    }
    return out;
}

std::string meta_unescape(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            out += s[i + 1] == 'n' ? '\n' : s[i + 1];
            ++i;
        } else {
            out += s[i];
        }
    }
    return out;
}

}  // namespace

ResultTable& ResultTable::column(const std::string& name, const std::string& unit) {
    if (!rows_.empty()) throw std::logic_error("ResultTable: schema is fixed once rows exist");
    if (column_index(name) >= 0) throw std::logic_error("ResultTable: duplicate column " + name);
    columns_.push_back({name, unit, false});
    return *this;
}

ResultTable& ResultTable::complex_column(const std::string& name, const std::string& unit) {
    column(name + "_re", unit);
    return column(name + "_im", unit);
}

ResultTable& ResultTable::text_column(const std::string& name) {
    column(name, "");
    columns_.back().text = true;
    return *this;
}

void ResultTable::add_row(std::vector<Cell> cells) {
    if (cells.size() != columns_.size())
        throw std::logic_error("ResultTable " + name_ + ": row has " + std::to_string(cells.size()) + " cells, schema " +
                               std::to_string(columns_.size()));
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (std::holds_alternative<std::string>(cells[i]) != columns_[i].text)
            throw std::logic_error("ResultTable " + name_ + ": type mismatch in column " + columns_[i].name);
    rows_.push_back(std::move(cells));
}

ResultTable::RowBuilder& ResultTable::RowBuilder::operator<<(double v) {
    cells_.emplace_back(v);
    return *this;
}
ResultTable::RowBuilder& ResultTable::RowBuilder::operator<<(cplx v) {
    cells_.emplace_back(v.real());
    cells_.emplace_back(v.imag());
    return *this;
}
ResultTable::RowBuilder& ResultTable::RowBuilder::operator<<(const std::string& s) {
    cells_.emplace_back(s);
    return *this;
}
ResultTable::RowBuilder::~RowBuilder() noexcept(false) {
    if (std::uncaught_exceptions() == 0) t_.add_row(std::move(cells_));
}

int ResultTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name == name) return int(i);
    return -1;
}

double ResultTable::number(std::size_t row, const std::string& col) const {
    const int i = column_index(col);
    if (i < 0) throw std::out_of_range("ResultTable: no column " + col);
    return std::get<double>(rows_.at(row)[i]);
}

cplx ResultTable::complex(std::size_t row, const std::string& col) const {
    return {number(row, col + "_re"), number(row, col + "_im")};
}

bool ResultTable::operator==(const ResultTable& o) const {
    if (name_ != o.name_ || meta_ != o.meta_ || columns_.size() != o.columns_.size() || rows_.size() != o.rows_.size())
        return false;
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i].name != o.columns_[i].name || columns_[i].unit != o.columns_[i].unit ||
            columns_[i].text != o.columns_[i].text)
            return false;
    for (std::size_t r = 0; r < rows_.size(); ++r)
        for (std::size_t c = 0; c < columns_.size(); ++c) {
            const auto& a = rows_[r][c];
            const auto& b = o.rows_[r][c];
            if (a.index() != b.index()) return false;
            if (const double* x = std::get_if<double>(&a)) {
                const double y = std::get<double>(b);
                if (!(*x == y || (std::isnan(*x) && std::isnan(y)))) return false;
            } else if (std::get<std::string>(a) != std::get<std::string>(b)) {
                return false;
            }
        }
    return true;
}

TableFormat parse_format(const std::string& s) {
    if (s == "csv") return TableFormat::csv;
    if (s == "json") return TableFormat::json;
    throw ConfigError("unknown table format '" + s + "' (csv or json)");
}

const char* format_extension(TableFormat f) { return f == TableFormat::csv ? "csv" : "json"; }

void write_table(const ResultTable& t, std::ostream& os, TableFormat f) {
    if (f == TableFormat::json) {
        nlohmann::ordered_json j;
        j["table"] = t.name();
        j["metadata"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : t.metadata()) j["metadata"][k] = v;
        j["columns"] = nlohmann::ordered_json::array();
        for (const auto& c : t.columns())
            j["columns"].push_back({{"name", c.name}, {"unit", c.unit}, {"type", c.text ? "text" : "number"}});
        j["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : t.rows()) {
            auto r = nlohmann::ordered_json::array();
            for (const auto& cell : row) {
                if (const double* v = std::get_if<double>(&cell)) {
                    // non-finite values have no JSON literal
                    if (std::isfinite(*v)) r.push_back(*v);
                    else r.push_back(fmt_double(*v));
                } else {
                    r.push_back(std::get<std::string>(cell));
                }
            }
            j["rows"].push_back(std::move(r));
        }
        os << j.dump(1) << "\n";
        return;
    }
    os << "# table: " << meta_escape(t.name()) << "\n";
    for (const auto& [k, v] : t.metadata()) os << "# meta " << k << ": " << meta_escape(v) << "\n";
    os << "# units:";
    for (std::size_t i = 0; i < t.columns().size(); ++i) os << (i ? "," : " ") << csv_quote(t.columns()[i].unit);
    os << "\n# types:";
    for (std::size_t i = 0; i < t.columns().size(); ++i) os << (i ? "," : " ") << (t.columns()[i].text ? "text" : "number");
    os << "\n";
    for (std::size_t i = 0; i < t.columns().size(); ++i) os << (i ? "," : "") << csv_quote(t.columns()[i].name);
    os << "\n";
    for (const auto& row : t.rows()) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            if (const double* v = std::get_if<double>(&row[i])) os << fmt_double(*v);
            else os << csv_quote(std::get<std::string>(row[i]));
        }
        os << "\n";
    }
}

ResultTable read_table(std::istream& is, TableFormat f) {
    if (f == TableFormat::json) {
        const auto j = nlohmann::json::parse(is);
        ResultTable t(j.at("table").get<std::string>());
        for (const auto& [k, v] : j.at("metadata").items()) t.metadata()[k] = v.get<std::string>();
        for (const auto& c : j.at("columns")) {
            if (c.at("type") == "text") t.text_column(c.at("name").get<std::string>());
            else t.column(c.at("name").get<std::string>(), c.at("unit").get<std::string>());
        }
        for (const auto& r : j.at("rows")) {
            std::vector<Cell> cells;
            for (std::size_t i = 0; i < r.size(); ++i) {
                if (t.columns().at(i).text) cells.emplace_back(r[i].get<std::string>());
                else if (r[i].is_string()) cells.emplace_back(parse_double(r[i].get<std::string>()));
                else cells.emplace_back(r[i].get<double>());
            }
            t.add_row(std::move(cells));
        }
        return t;
    }
    std::string line, name;
    std::map<std::string, std::string> meta;
    std::vector<std::string> units, types;
    while (std::getline(is, line) && line.rfind("# ", 0) == 0) {
        const std::string body = line.substr(2);
        if (body.rfind("table: ", 0) == 0) {
            name = meta_unescape(body.substr(7));
        } else if (body.rfind("meta ", 0) == 0) {
            const auto colon = body.find(": ");
            if (colon == std::string::npos) throw std::runtime_error("malformed metadata line: " + line);
            meta[body.substr(5, colon - 5)] = meta_unescape(body.substr(colon + 2));
        } else if (body.rfind("units:", 0) == 0) {
            units = csv_split(body.size() > 7 ? body.substr(7) : "");
        } else if (body.rfind("types:", 0) == 0) {
            types = csv_split(body.size() > 7 ? body.substr(7) : "");
        }
    }
    ResultTable t(name);
    t.metadata() = meta;
    const auto header = csv_split(line);
    if (header.size() != types.size() || header.size() != units.size())
        throw std::runtime_error("CSV header does not match the declared schema");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (types[i] == "text") t.text_column(header[i]);
        else t.column(header[i], units[i]);
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto fields = csv_split(line);
        if (fields.size() != header.size()) throw std::runtime_error("CSV row width mismatch: " + line);
        std::vector<Cell> cells;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (t.columns()[i].text) cells.emplace_back(fields[i]);
            else cells.emplace_back(parse_double(fields[i]));
        }
        t.add_row(std::move(cells));
    }
    return t;
}

void write_table_file(const ResultTable& t, const std::string& path, TableFormat f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_table(t, os, f);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path);
}

ResultTable read_table_file(const std::string& path, TableFormat f) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    try {
        return read_table(is, f);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace greens
