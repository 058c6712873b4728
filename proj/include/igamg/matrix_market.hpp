#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "igamg/sparse.hpp"

namespace igamg {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::filesystem::path& path, std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class MatrixMarketSymmetry { General, Symmetric };

/// Reads a `coordinate real {general|symmetric}` file. Symmetric files are
/// expanded to full storage; duplicate coordinates are summed.
SparseMatrix read_matrix_market(const std::filesystem::path& path);

/// Reads a dense vector stored either as `array real general` with one
/// column or as an n x 1 coordinate file.
Vector read_matrix_market_vector(const std::filesystem::path& path);

/// Writes in coordinate format with 17 significant digits. `Symmetric`
/// stores the lower triangle only and requires an exactly symmetric matrix.
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a,
                         MatrixMarketSymmetry symmetry = MatrixMarketSymmetry::General);

/// Writes `array real general`, one value per line.
void write_matrix_market_vector(const std::filesystem::path& path, std::span<const double> v);

}  // namespace igamg
