#ifndef SDLAB_TABLE_HPP
#define SDLAB_TABLE_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdlab/types.hpp"

namespace sdlab {

/// Column-oriented table: text columns for keys, numeric columns for data.
/// NaN encodes missing numeric values; they serialize as empty CSV fields.
class DataTable {
public:
    std::size_t rows() const { return n_rows_; }
    std::size_t cols() const { return columns_.size(); }
    bool has(const std::string& name) const;
    const std::vector<std::string>& column_names() const { return order_; }

    void add_text(const std::string& name, std::vector<std::string> values);
    void add_num(const std::string& name, std::vector<double> values);

    bool is_text(const std::string& name) const;
    /// Numeric view of a column. Text columns are converted once and cached;
    /// conversion failures throw DataError naming the column.
    const std::vector<double>& num(const std::string& name) const;
    const std::vector<std::string>& text(const std::string& name) const;

    DataTable select_rows(const std::vector<std::size_t>& rows) const;

    /// `comment`, when non-empty, is written as a leading `# ...` metadata
    /// line (the reader skips such lines).
    void write_csv(std::ostream& out, const std::string& comment = {}) const;
    void write_csv_file(const std::string& path, const std::string& comment = {}) const;
    static DataTable read_csv(std::istream& in);
    static DataTable read_csv_file(const std::string& path);

private:
    struct Column {
        std::string name;
        bool text = false;
        std::vector<std::string> s;
        mutable std::vector<double> v;
        mutable bool num_cached = false;
    };

    Column& col(const std::string& name);
    const Column& col(const std::string& name) const;

    std::size_t n_rows_ = 0;
    bool has_columns_ = false;
    std::vector<Column> columns_;
    std::vector<std::string> order_;
};

/// Full-precision float formatting used for CSV payloads (round-trips exactly).
std::string format_double(double v);

}  // namespace sdlab

#endif
