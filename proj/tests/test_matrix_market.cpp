#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "igamg/matrix_market.hpp"

using namespace igamg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "igamg_test_mm";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& body) {
  const fs::path p = scratch(name);
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("symmetric file is expanded") {
  const auto p = write_file("sym.mtx",
                            "%%MatrixMarket matrix coordinate real symmetric\n"
                            "% comment\n"
                            "2 2 3\n"
                            "1 1 2\n"
                            "2 1 -1\n"
                            "2 2 2\n");
  const SparseMatrix a = read_matrix_market(p);
  CHECK(testing::to_dense(a) == (Eigen::MatrixXd(2, 2) << 2, -1, -1, 2).finished());
}

TEST_CASE("general file with duplicates") {
  const auto p = write_file("gen.mtx",
                            "%%MatrixMarket matrix coordinate real general\n"
                            "2 3 3\n"
                            "1 3 1.5\n"
                            "1 3 0.5\n"
                            "2 1 -4e-1\n");
  const SparseMatrix a = read_matrix_market(p);
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 3);
  CHECK(a.coeff(0, 2) == 2.0);
  CHECK(a.coeff(1, 0) == -0.4);
}

TEST_CASE("parse errors carry the line number") {
  const auto bad_index = write_file("bad_index.mtx",
                                    "%%MatrixMarket matrix coordinate real general\n"
                                    "2 2 2\n"
                                    "1 1 1\n"
                                    "3 1 1\n");
  try {
    read_matrix_market(bad_index);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  const auto complex_field = write_file("complex.mtx",
                                        "%%MatrixMarket matrix coordinate complex general\n"
                                        "1 1 1\n1 1 1 0\n");
  CHECK_THROWS_AS(read_matrix_market(complex_field), ParseError);
  const auto bad_header = write_file("header.mtx", "%%MatrixMarket vector\n1 1 1\n1 1 1\n");
  CHECK_THROWS_AS(read_matrix_market(bad_header), ParseError);
  const auto short_file = write_file("short.mtx",
                                     "%%MatrixMarket matrix coordinate real general\n"
                                     "2 2 3\n1 1 1\n");
  CHECK_THROWS_AS(read_matrix_market(short_file), ParseError);
  const auto garbage = write_file("garbage.mtx",
                                  "%%MatrixMarket matrix coordinate real general\n"
                                  "2 2 1\n1 x 1\n");
  CHECK_THROWS_AS(read_matrix_market(garbage), ParseError);
}

TEST_CASE("round trip is value exact") {
  std::mt19937_64 gen(3);
  const Eigen::MatrixXd k = testing::random_spd(30, 0.2, gen);
  const SparseMatrix a = testing::from_dense(k, true);
  for (auto sym : {MatrixMarketSymmetry::General, MatrixMarketSymmetry::Symmetric}) {
    const auto p = scratch(sym == MatrixMarketSymmetry::General ? "rt_gen.mtx" : "rt_sym.mtx");
    write_matrix_market(p, a, sym);
    const SparseMatrix b = read_matrix_market(p);
    CHECK(testing::to_dense(b) == k);
  }
  const Vector v{1.0 / 3.0, -2.5e-300, 7.0, 0.1};
  const auto pv = scratch("vec.mtx");
  write_matrix_market_vector(pv, v);
  CHECK(read_matrix_market_vector(pv) == v);
}

TEST_CASE("coordinate column vector") {
  const auto p = write_file("cvec.mtx",
                            "%%MatrixMarket matrix coordinate real general\n"
                            "3 1 2\n1 1 4\n3 1 -1\n");
  CHECK(read_matrix_market_vector(p) == Vector{4, 0, -1});
}

TEST_CASE("symmetric write rejects asymmetric matrices") {
  const SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 1, 1.0}});
  CHECK_THROWS(write_matrix_market(scratch("asym.mtx"), a, MatrixMarketSymmetry::Symmetric));
}
