#pragma once

#include <string>

#include "certeig/sparse_core.hpp"

namespace certeig {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads a coordinate-format real symmetric Matrix Market file. Indices are
/// 1-based on disk and 0-based in memory. Throws ParseError (naming the line
/// number) on malformed input, a non-symmetric field, or out-of-range indices.
SparseSymMatrix readMatrixMarket(const std::string& path);

/// Writes the lower triangle as "matrix coordinate real symmetric" with
/// 17 significant digits so round trips preserve values bit-exactly.
void writeMatrixMarket(const SparseSymMatrix& M, const std::string& path);

}  // namespace certeig
