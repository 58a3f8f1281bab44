#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "greens/complex.hpp"
#include "greens/geometry.hpp"
#include "greens/potential.hpp"

namespace greens {

/// Malformed or inconsistent scenario; the CLI maps it to exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Column {
    std::string name;
    std::string unit;  // "1" for dimensionless
    bool text = false;
};

using Cell = std::variant<double, std::string>;

/// Columns are fixed before the first row. Complex values occupy two
/// columns, <name>_re and <name>_im.
class ResultTable {
public:
    ResultTable() = default;
    explicit ResultTable(std::string name) : name_(std::move(name)) {}

    ResultTable& column(const std::string& name, const std::string& unit = "1");
    ResultTable& complex_column(const std::string& name, const std::string& unit = "1");
    ResultTable& text_column(const std::string& name);

    class RowBuilder {
    public:
        RowBuilder& operator<<(double v);
        RowBuilder& operator<<(int v) { return *this << double(v); }
        RowBuilder& operator<<(cplx v);
        RowBuilder& operator<<(const std::string& s);
        RowBuilder& operator<<(const char* s) { return *this << std::string(s); }
        ~RowBuilder() noexcept(false);

    private:
        friend class ResultTable;
        explicit RowBuilder(ResultTable& t) : t_(t) {}
        ResultTable& t_;
        std::vector<Cell> cells_;
    };
    RowBuilder row() { return RowBuilder(*this); }
    void add_row(std::vector<Cell> cells);

    const std::string& name() const { return name_; }
    const std::vector<Column>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    std::map<std::string, std::string>& metadata() { return meta_; }
    const std::map<std::string, std::string>& metadata() const { return meta_; }

    int column_index(const std::string& name) const;
    double number(std::size_t row, const std::string& col) const;
    cplx complex(std::size_t row, const std::string& col) const;

    bool operator==(const ResultTable& o) const;

private:
    std::string name_;
    std::vector<Column> columns_;
    std::vector<std::vector<Cell>> rows_;
    std::map<std::string, std::string> meta_;
};

enum class TableFormat { csv, json };
TableFormat parse_format(const std::string& s);
const char* format_extension(TableFormat f);

void write_table(const ResultTable& t, std::ostream& os, TableFormat f);
ResultTable read_table(std::istream& is, TableFormat f);
/// Throws std::runtime_error naming the path on I/O failure.
void write_table_file(const ResultTable& t, const std::string& path, TableFormat f);
ResultTable read_table_file(const std::string& path, TableFormat f);

// ------------------------------------------------------------------ catalogs

struct CatalogEntry {
    std::string name;
    std::vector<std::string> params;  // required first, optional marked with '?'
    std::string description;
};
const std::vector<CatalogEntry>& potential_catalog();
const std::vector<CatalogEntry>& surface_catalog();
const std::vector<CatalogEntry>& experiment_catalog();

struct PotentialSpec {
    std::string type;
    std::map<std::string, double> num;
    std::map<std::string, std::vector<double>> lists;
    Potential1D build() const;
    std::string label() const;
};

struct SurfaceSpec {
    std::string type;
    std::map<std::string, double> num;
    std::vector<double> vec;  // center, normal or semi-axes
    std::vector<double> point;  // point on the surface, default chosen per type
    double scale = 1.0;
    double relabel = 0.0;  // L of t + t^2/(2L); 0 means none
    std::map<std::string, double> expect;  // c1, d2
    std::vector<SurfaceSpec> variants;
    ImplicitSurface build() const;
    Vec3 foot() const;
    std::string label() const;
};

// ------------------------------------------------------------------ scenarios

struct Window {
    double lo = 0.0, hi = 0.0;
    int samples = 0;
    int degree = 0;
    bool set = false;
};

struct Scenario {
    int version = 1;
    std::string name;
    std::string kind;
    std::string mode;
    std::string tag;
    DomainSpec domain = DomainSpec::half_line();
    std::vector<PotentialSpec> potentials;
    std::vector<SurfaceSpec> surfaces;
    std::vector<cplx> z;
    Window window;
    std::map<std::string, double> tolerances;
    std::map<std::string, double> params;
    std::map<std::string, std::vector<double>> lists;
    std::string output_dir;
    std::string source;  // config text, hashed into table metadata
    std::string hash() const;
    double param(const std::string& key, double fallback) const;
    std::vector<double> list(const std::string& key, std::vector<double> fallback) const;
};

inline constexpr int kScenarioVersion = 1;

/// Parses and validates against the schema. Throws ConfigError.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);

struct Check {
    std::string name;
    double value = 0.0;  // error measure compared against tol
    double tol = 0.0;
    bool passed = false;
};

struct ExperimentResult {
    std::string scenario;
    std::vector<ResultTable> tables;
    std::vector<Check> checks;
    bool passed() const;
    ResultTable summary() const;
};

struct RunOptions {
    double tol_scale = 1.0;
};

/// Numerical failures propagate as NumericalError subclasses.
ExperimentResult run_scenario(const Scenario& s, const RunOptions& opt = {});

/// <dir>/<table>.<ext> for each table plus summary.<ext>.
void write_result(const ExperimentResult& r, const std::string& dir, TableFormat f);

}  // namespace greens
