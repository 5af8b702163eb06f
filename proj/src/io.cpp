#include "lfso/problems.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>

namespace lfso {

namespace {

double read_double(std::istream& in, const std::string& what)
{
    std::string tok;
    if (!(in >> tok))
        throw Error(Errc::parse_error, "unexpected end of input while reading " + what);
    try {
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size())
            throw Error(Errc::parse_error, "malformed number '" + tok + "' in " + what);
        return v;
    } catch (const std::logic_error&) {
        throw Error(Errc::parse_error, "malformed number '" + tok + "' in " + what);
    }
}

std::istringstream strip_comments(std::istream& raw)
{
    std::string text, line;
    while (std::getline(raw, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        text += line;
        text += '\n';
    }
    return std::istringstream(text);
}

} // namespace

RegressionData parse_regression_data(std::istream& raw)
{
    auto in = strip_comments(raw);
    long n = 0;
    long d = 0;
    if (!(in >> n >> d) || n < 1 || d < 1)
        throw Error(Errc::parse_error, "header must be two positive integers \"n d\"");

    RegressionData data;
    data.a.resize(n, d);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < d; ++j)
            data.a(i, j) = read_double(in, "row " + std::to_string(i + 1) + " of A");
    data.b.resize(n);
    for (long i = 0; i < n; ++i)
        data.b[i] = read_double(in, "b");

    std::string extra;
    if (in >> extra)
        throw Error(Errc::parse_error, "trailing data after b: '" + extra + "'");
    if (!data.a.allFinite() || !data.b.allFinite())
        throw Error(Errc::parse_error, "non-finite entry in regression data");
    return data;
}

RegressionData read_regression_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io_error, "cannot open " + path);
    return parse_regression_data(in);
}

void write_regression_data(std::ostream& out, const RegressionData& data)
{
    out << data.a.rows() << ' ' << data.a.cols() << '\n';
    out << std::setprecision(17);
    for (Index i = 0; i < data.a.rows(); ++i) {
        for (Index j = 0; j < data.a.cols(); ++j)
            out << (j ? " " : "") << data.a(i, j);
        out << '\n';
    }
    for (Index i = 0; i < data.b.size(); ++i)
        out << (i ? " " : "") << data.b[i];
    out << '\n';
}

VectorXd read_vector_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io_error, "cannot open " + path);
    std::vector<double> values;
    while (in >> std::ws, !in.eof())
        values.push_back(read_double(in, path));
    if (values.empty())
        throw Error(Errc::parse_error, path + " holds no values");
    VectorXd v = Eigen::Map<VectorXd>(values.data(), static_cast<Index>(values.size()));
    if (!v.allFinite())
        throw Error(Errc::parse_error, "non-finite entry in " + path);
    return v;
}

} // namespace lfso
