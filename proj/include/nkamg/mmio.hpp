#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nkamg/sparse.hpp"

namespace nkamg {

/// MatrixMarket coordinate format, real or integer field, general or symmetric.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::string& path);

/// Symmetric output stores the lower triangle only; the caller asserts symmetry.
void write_matrix_market(std::ostream& out, const SparseMatrix& a, bool symmetric = false);
void write_matrix_market(const std::string& path, const SparseMatrix& a, bool symmetric = false);

/// One index set per line, space separated.
void write_index_sets(const std::string& path, const std::vector<std::vector<std::size_t>>& sets);
std::vector<std::vector<std::size_t>> read_index_sets(const std::string& path);

} // namespace nkamg
