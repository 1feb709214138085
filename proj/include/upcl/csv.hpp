#ifndef UPCL_CSV_HPP
#define UPCL_CSV_HPP

#include <fstream>
#include <string>
#include <vector>

namespace upcl::csv {

// Shortest decimal string that round-trips to the same double ('.' decimal
// point, no locale); keeps output files byte-stable across runs.
std::string format_double(double value);

// Comma-separated writer with '#' comment lines; no quoting — fields must
// not contain commas or newlines.
class Writer {
public:
    explicit Writer(const std::string& path);

    void comment(const std::string& text);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& fields);
    void close();

private:
    std::string path_;
    std::ofstream out_;
    void line(const std::string& text);
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> row_lines; // 1-based source line of each row
};

// Reads a comma-separated file: first non-comment line is the header,
// '#' lines and blank lines are skipped.  Ragged rows are an error.
Table read(const std::string& path);

// Strict double parse for a CSV field; errors carry file and line.
double to_double(const std::string& field, const std::string& path, int line);

} // namespace upcl::csv

#endif
