#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace uavdnn::csv {

/// Shortest text that reads back to the same double.
std::string num(double v);

/// Builds one comma-separated line (no quoting; callers never emit commas in
/// cells).
class Row {
public:
    Row& operator<<(double v);
    Row& operator<<(int v);
    Row& operator<<(long v);
    Row& operator<<(unsigned long v);
    Row& operator<<(const std::string& v);
    Row& operator<<(const char* v);
    std::string str() const { return line_ + "\n"; }

private:
    void sep();
    std::string line_;
    bool first_ = true;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column; throws ParseError naming it when absent.
    std::size_t column(const std::string& name) const;
};

Table parse(const std::string& text);
Table read(const std::filesystem::path& path);

/// Writes via a temporary file and rename so readers never see partial output.
void write_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace uavdnn::csv
