#include "upcl/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include "upcl/errors.hpp"

namespace upcl::csv {

std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) throw NumericalError("format_double: conversion failed");
    return std::string(buffer, ptr);
}

Writer::Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot open output file: " + path);
}

void Writer::line(const std::string& text) {
    out_ << text << '\n';
    if (!out_) throw ConfigError("write failed: " + path_);
}

void Writer::comment(const std::string& text) {
    line("# " + text);
}

void Writer::header(const std::vector<std::string>& names) {
    row(names);
}

void Writer::row(const std::vector<std::string>& fields) {
    std::string joined;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) joined += ',';
        joined += fields[i];
    }
    line(joined);
}

void Writer::close() {
    out_.close();
    if (out_.fail()) throw ConfigError("write failed: " + path_);
}

namespace {

std::vector<std::string> split_fields(const std::string& text) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : text) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(current);
    return fields;
}

} // namespace

Table read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    Table table;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty() || raw.front() == '#') continue;
        std::vector<std::string> fields = split_fields(raw);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": expected " << table.header.size()
                << " fields, got " << fields.size();
            throw ConfigError(msg.str());
        }
        table.rows.push_back(std::move(fields));
        table.row_lines.push_back(line_no);
    }
    if (table.header.empty())
        throw ConfigError(path + ": missing header row");
    return table;
}

double to_double(const std::string& field, const std::string& path, int line) {
    const char* begin = field.c_str();
    char* end = nullptr;
    errno = 0;
    double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE) {
        std::ostringstream msg;
        msg << path << ":" << line << ": not a number: '" << field << "'";
        throw ConfigError(msg.str());
    }
    return value;
}

} // namespace upcl::csv
