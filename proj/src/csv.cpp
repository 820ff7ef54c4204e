#include "uavdnn/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "uavdnn/error.hpp"

namespace uavdnn::csv {

std::string num(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void Row::sep()
{
    if (!first_)
        line_ += ',';
    first_ = false;
}

Row& Row::operator<<(double v)
{
    sep();
    line_ += num(v);
    return *this;
}

Row& Row::operator<<(int v)
{
    sep();
    line_ += std::to_string(v);
    return *this;
}

Row& Row::operator<<(long v)
{
    sep();
    line_ += std::to_string(v);
    return *this;
}

Row& Row::operator<<(unsigned long v)
{
    sep();
    line_ += std::to_string(v);
    return *this;
}

Row& Row::operator<<(const std::string& v)
{
    sep();
    line_ += v;
    return *this;
}

Row& Row::operator<<(const char* v)
{
    return *this << std::string(v);
}

std::size_t Table::column(const std::string& name) const
{
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return i;
    throw ParseError("csv: missing column " + name);
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cell);
            cell.clear();
        } else if (ch != '\r') {
            cell += ch;
        }
    }
    cells.push_back(cell);
    return cells;
}

} // namespace

Table parse(const std::string& text)
{
    Table t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("csv: empty input");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        auto cells = split(line);
        if (cells.size() != t.header.size())
            throw ParseError("csv: row " + std::to_string(t.rows.size() + 2) + " has " +
                             std::to_string(cells.size()) + " cells, expected " + std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

Table read(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot write " + tmp.string());
        out << content;
        if (!out)
            throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

} // namespace uavdnn::csv
