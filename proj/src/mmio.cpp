#include "nkamg/mmio.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace nkamg {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

} // namespace

SparseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("MatrixMarket: empty input");
    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate")
        throw Error("MatrixMarket: only coordinate matrices are supported");
    field = lower(field);
    symmetry = lower(symmetry);
    if (field != "real" && field != "integer" && field != "double")
        throw Error("MatrixMarket: unsupported field '" + field + "'");
    if (symmetry != "general" && symmetry != "symmetric")
        throw Error("MatrixMarket: unsupported symmetry '" + symmetry + "'");
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '%') break;
    std::size_t nr = 0, nc = 0, nz = 0;
    {
        std::istringstream sz(line);
        if (!(sz >> nr >> nc >> nz)) throw Error("MatrixMarket: malformed size line");
    }
    std::vector<Triplet> t;
    t.reserve(symmetry == "symmetric" ? 2 * nz : nz);
    for (std::size_t k = 0; k < nz; ++k) {
        std::size_t i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v)) throw Error("MatrixMarket: truncated entry list");
        if (i == 0 || j == 0 || i > nr || j > nc) throw Error("MatrixMarket: index out of range");
        t.push_back({i - 1, j - 1, v});
        if (symmetry == "symmetric" && i != j) t.push_back({j - 1, i - 1, v});
    }
    return SparseMatrix::from_triplets(nr, nc, t);
}

SparseMatrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a, bool symmetric) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < a.nrows(); ++i)
        for (std::size_t j : a.row_cols(i))
            if (!symmetric || j <= i) ++count;
    out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << "\n";
    out << a.nrows() << " " << a.ncols() << " " << count << "\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < a.nrows(); ++i) {
        auto c = a.row_cols(i);
        auto v = a.row_vals(i);
        for (std::size_t k = 0; k < c.size(); ++k)
            if (!symmetric || c[k] <= i) out << i + 1 << " " << c[k] + 1 << " " << v[k] << "\n";
    }
}

void write_matrix_market(const std::string& path, const SparseMatrix& a, bool symmetric) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    write_matrix_market(out, a, symmetric);
}

void write_index_sets(const std::string& path, const std::vector<std::vector<std::size_t>>& sets) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    for (const auto& s : sets) {
        for (std::size_t k = 0; k < s.size(); ++k) out << (k ? " " : "") << s[k];
        out << "\n";
    }
}

std::vector<std::vector<std::size_t>> read_index_sets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::vector<std::vector<std::size_t>> sets;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        sets.emplace_back();
        std::size_t v = 0;
        while (ls >> v) sets.back().push_back(v);
    }
    return sets;
}

} // namespace nkamg
