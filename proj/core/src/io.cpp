#include "rmx/io.hpp"

#include <fstream>
#include <sstream>

namespace rmx {

namespace {

[[noreturn]] void parse_fail(const std::string& name, std::size_t line, const std::string& what) {
    throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

DenseMatrix read_matrix(std::istream& is, const std::string& name) {
    std::string header;
    if (!std::getline(is, header)) parse_fail(name, 1, "empty input, expected 'rows cols' header");
    std::istringstream hs(header);
    long long rows = -1, cols = -1;
    if (!(hs >> rows >> cols) || rows < 0 || cols < 0)
        parse_fail(name, 1, "malformed header, expected 'rows cols'");
    std::string extra;
    if (hs >> extra) parse_fail(name, 1, "trailing tokens after 'rows cols'");
    DenseMatrix a{std::size_t(rows), std::size_t(cols)};
    std::size_t line = 2, count = 0, need = std::size_t(rows) * std::size_t(cols);
    std::string body;
    while (count < need && std::getline(is, body)) {
        std::istringstream bs(body);
        double v;
        while (bs >> v) {
            if (count >= need) parse_fail(name, line, "more values than rows*cols");
            a.data()[count++] = v;
        }
        if (!bs.eof()) parse_fail(name, line, "non-numeric token");
        ++line;
    }
    if (count < need)
        parse_fail(name, line, "expected " + std::to_string(need) + " values, got " +
                                   std::to_string(count));
    return a;
}

DenseMatrix read_matrix_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open");
    return read_matrix(f, path);
}

void write_matrix(std::ostream& os, const DenseMatrix& a) {
    os << a.rows() << ' ' << a.cols() << '\n';
    os.precision(17);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) os << a(i, j) << (j + 1 < a.cols() ? ' ' : '\n');
    }
}

void write_matrix_file(const std::string& path, const DenseMatrix& a) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error(path + ": cannot open for writing");
    write_matrix(f, a);
}

Vec read_vector_file(const std::string& path) {
    DenseMatrix m = read_matrix_file(path);
    if (m.cols() != 1) throw std::runtime_error(path + ": expected a 1-column matrix");
    return m.column(0);
}

void write_vector_file(const std::string& path, const Vec& v) {
    write_matrix_file(path, DenseMatrix::from_column(v));
}

}  // namespace rmx
