#include "certeig/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace certeig {

namespace {

std::string lowered(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void fail(const std::string& path, long line, const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

SparseSymMatrix readMatrixMarket(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");

  std::string line;
  long lineno = 0;

  if (!std::getline(in, line)) fail(path, 1, "empty file");
  ++lineno;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") fail(path, lineno, "missing %%MatrixMarket banner");
  if (lowered(object) != "matrix" || lowered(format) != "coordinate")
    fail(path, lineno, "expected 'matrix coordinate' header");
  if (lowered(field) != "real") fail(path, lineno, "expected real field, got '" + field + "'");
  if (lowered(symmetry) != "symmetric")
    fail(path, lineno, "expected symmetric matrix, got '" + symmetry + "'");

  long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream sz(line);
    if (!(sz >> rows >> cols >> nnz)) fail(path, lineno, "malformed size line");
    break;
  }
  if (rows < 0) fail(path, lineno, "missing size line");
  if (rows != cols) fail(path, lineno, "symmetric matrix must be square");

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(nnz));
  long seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    long i, j;
    double v;
    if (!(entry >> i >> j >> v)) fail(path, lineno, "malformed entry line");
    if (i < 1 || j < 1 || i > rows || j > cols)
      fail(path, lineno, "index (" + std::to_string(i) + "," + std::to_string(j) +
                             ") out of range for " + std::to_string(rows) + "x" +
                             std::to_string(cols) + " matrix");
    trip.emplace_back(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
    ++seen;
  }
  if (seen != nnz)
    fail(path, lineno, "entry count " + std::to_string(seen) + " does not match header nnz " +
                           std::to_string(nnz));
  try {
    return SparseSymMatrix::fromTriplets(static_cast<Index>(rows), trip);
  } catch (const ConstructionError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void writeMatrixMarket(const SparseSymMatrix& M, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << M.rows() << " " << M.rows() << " " << M.nonZeros() << "\n";
  out.precision(17);
  const auto& L = M.lower();
  for (int c = 0; c < L.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(L, c); it; ++it) {
      out << (it.row() + 1) << " " << (it.col() + 1) << " " << it.value() << "\n";
    }
  }
  if (!out) throw ParseError(path + ": write failed");
}

}  // namespace certeig
