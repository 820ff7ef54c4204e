#include "uavdnn/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "uavdnn/csv.hpp"
#include "uavdnn/error.hpp"

namespace uavdnn {

std::string checkpoint_text(const std::vector<NamedTensor>& tensors)
{
    std::string out = std::string(kCheckpointMagic) + "\n";
    out += "tensors " + std::to_string(tensors.size()) + "\n";
    char buf[40];
    for (const auto& t : tensors) {
        if (t.name.find_first_of(" \n\t") != std::string::npos)
            throw ValidationError("checkpoint: tensor names cannot contain whitespace");
        out += t.name + " " + std::to_string(t.value.rows()) + " " + std::to_string(t.value.cols()) + "\n";
        for (Eigen::Index r = 0; r < t.value.rows(); ++r) {
            for (Eigen::Index c = 0; c < t.value.cols(); ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", t.value(r, c));
                if (c > 0)
                    out += ' ';
                out += buf;
            }
            out += '\n';
        }
    }
    return out;
}

std::vector<NamedTensor> parse_checkpoint(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCheckpointMagic)
        throw ParseError("checkpoint: bad magic (expected '" + std::string(kCheckpointMagic) + "')");
    std::string word;
    std::size_t count = 0;
    if (!(in >> word >> count) || word != "tensors")
        throw ParseError("checkpoint: missing tensor count");
    std::vector<NamedTensor> out;
    for (std::size_t i = 0; i < count; ++i) {
        NamedTensor t;
        long rows = 0;
        long cols = 0;
        if (!(in >> t.name >> rows >> cols) || rows < 0 || cols < 0)
            throw ParseError("checkpoint: bad header for tensor " + std::to_string(i));
        t.value.resize(rows, cols);
        for (long r = 0; r < rows; ++r)
            for (long c = 0; c < cols; ++c) {
                std::string tok;
                if (!(in >> tok))
                    throw ParseError("checkpoint: truncated payload in " + t.name);
                t.value(r, c) = std::stod(tok);
            }
        out.push_back(std::move(t));
    }
    return out;
}

void write_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors)
{
    csv::write_atomic(path, checkpoint_text(tensors));
}

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("missing checkpoint " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_checkpoint(ss.str());
}

void append_mlp(std::vector<NamedTensor>& out, const std::string& prefix, const Mlp& net)
{
    for (std::size_t i = 0; i < net.num_layers(); ++i) {
        out.push_back({prefix + ".W" + std::to_string(i), net.weights()[i]});
        out.push_back({prefix + ".b" + std::to_string(i), Matrix(net.biases()[i])});
    }
}

void load_mlp(const std::vector<NamedTensor>& in, const std::string& prefix, Mlp& net)
{
    auto find = [&](const std::string& name) -> const Matrix& {
        for (const auto& t : in)
            if (t.name == name)
                return t.value;
        throw ParseError("checkpoint: missing tensor " + name);
    };
    for (std::size_t i = 0; i < net.num_layers(); ++i) {
        const auto& w = find(prefix + ".W" + std::to_string(i));
        const auto& b = find(prefix + ".b" + std::to_string(i));
        auto& nw = net.weights()[i];
        auto& nb = net.biases()[i];
        if (w.rows() != nw.rows() || w.cols() != nw.cols() || b.rows() != nb.size() || b.cols() != 1)
            throw ShapeError("checkpoint: shape mismatch for " + prefix + " layer " + std::to_string(i));
        nw = w;
        nb = b.col(0);
    }
}

} // namespace uavdnn
