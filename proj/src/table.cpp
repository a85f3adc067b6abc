#include "sdlab/table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace sdlab {

std::string format_double(double v) {
    if (std::isnan(v)) return {};
    char buf[40];
    // %.17g round-trips any double; try shorter forms first for readability.
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

bool DataTable::has(const std::string& name) const {
    return std::any_of(columns_.begin(), columns_.end(),
                       [&](const Column& c) { return c.name == name; });
}

DataTable::Column& DataTable::col(const std::string& name) {
    for (Column& c : columns_)
        if (c.name == name) return c;
    throw DataError("no such column: " + name);
}

const DataTable::Column& DataTable::col(const std::string& name) const {
    for (const Column& c : columns_)
        if (c.name == name) return c;
    throw DataError("no such column: " + name);
}

void DataTable::add_text(const std::string& name, std::vector<std::string> values) {
    if (has(name)) throw DataError("duplicate column: " + name);
    if (has_columns_ && values.size() != n_rows_)
        throw DataError("column " + name + " length mismatch");
    n_rows_ = values.size();
    has_columns_ = true;
    Column c;
    c.name = name;
    c.text = true;
    c.s = std::move(values);
    columns_.push_back(std::move(c));
    order_.push_back(name);
}

void DataTable::add_num(const std::string& name, std::vector<double> values) {
    if (has(name)) throw DataError("duplicate column: " + name);
    if (has_columns_ && values.size() != n_rows_)
        throw DataError("column " + name + " length mismatch");
    n_rows_ = values.size();
    has_columns_ = true;
    Column c;
    c.name = name;
    c.text = false;
    c.v = std::move(values);
    c.num_cached = true;
    columns_.push_back(std::move(c));
    order_.push_back(name);
}

bool DataTable::is_text(const std::string& name) const { return col(name).text; }

const std::vector<double>& DataTable::num(const std::string& name) const {
    const Column& c = col(name);
    if (c.num_cached) return c.v;
    c.v.resize(c.s.size());
    for (std::size_t i = 0; i < c.s.size(); ++i) {
        const std::string& cell = c.s[i];
        if (cell.empty()) {
            c.v[i] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        char* end = nullptr;
        const double value = std::strtod(cell.c_str(), &end);
        if (end != cell.c_str() + cell.size())
            throw DataError("column " + name + " row " + std::to_string(i + 1) +
                            ": not numeric: \"" + cell + "\"");
        c.v[i] = value;
    }
    c.num_cached = true;
    return c.v;
}

const std::vector<std::string>& DataTable::text(const std::string& name) const {
    const Column& c = col(name);
    if (!c.text) throw DataError("column " + name + " is numeric, not text");
    return c.s;
}

DataTable DataTable::select_rows(const std::vector<std::size_t>& rows) const {
    DataTable out;
    for (const std::string& name : order_) {
        const Column& c = col(name);
        if (c.text) {
            std::vector<std::string> s;
            s.reserve(rows.size());
            for (std::size_t r : rows) s.push_back(c.s[r]);
            out.add_text(name, std::move(s));
        } else {
            std::vector<double> v;
            v.reserve(rows.size());
            const auto& src = num(name);
            for (std::size_t r : rows) v.push_back(src[r]);
            out.add_num(name, std::move(v));
        }
    }
    return out;
}

namespace {

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

void write_cell(std::ostream& out, const std::string& s) {
    if (!needs_quoting(s)) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

}  // namespace

void DataTable::write_csv(std::ostream& out, const std::string& comment) const {
    if (!comment.empty()) out << "# " << comment << '\n';
    for (std::size_t i = 0; i < order_.size(); ++i) {
        if (i) out << ',';
        write_cell(out, order_[i]);
    }
    out << '\n';
    for (std::size_t r = 0; r < n_rows_; ++r) {
        for (std::size_t i = 0; i < order_.size(); ++i) {
            if (i) out << ',';
            const Column& c = col(order_[i]);
            if (c.text)
                write_cell(out, c.s[r]);
            else
                out << format_double(c.v[r]);
        }
        out << '\n';
    }
}

void DataTable::write_csv_file(const std::string& path, const std::string& comment) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write csv: " + path);
    write_csv(out, comment);
}

DataTable DataTable::read_csv(std::istream& in) {
    // Leading '#' lines are metadata (config hash, version), not data.
    while (in.peek() == '#') {
        std::string comment;
        std::getline(in, comment);
    }
    // RFC-style parser: quoted fields may contain commas, quotes, newlines.
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char c;
    while (in.get(c)) {
        any = true;
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && in.peek() == '\n') in.get();
            record.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(record));
            record.clear();
        } else {
            field += c;
        }
    }
    if (!field.empty() || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    if (!any || records.empty()) throw DataError("empty csv");

    const auto& header = records.front();
    DataTable out;
    for (std::size_t j = 0; j < header.size(); ++j) {
        std::vector<std::string> column;
        column.reserve(records.size() - 1);
        for (std::size_t r = 1; r < records.size(); ++r) {
            if (records[r].size() != header.size())
                throw DataError("csv row " + std::to_string(r + 1) + " has " +
                                std::to_string(records[r].size()) + " fields, expected " +
                                std::to_string(header.size()));
            column.push_back(records[r][j]);
        }
        out.add_text(header[j], std::move(column));
    }
    return out;
}

DataTable DataTable::read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open csv: " + path);
    return read_csv(in);
}

}  // namespace sdlab
