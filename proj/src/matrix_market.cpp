#include "igamg/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace igamg {

ParseError::ParseError(const std::filesystem::path& path, std::size_t line,
                       const std::string& message)
    : std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + message),
      line_(line) {}

namespace {

enum class Layout { Coordinate, Array };

struct Header {
  Layout layout;
  MatrixMarketSymmetry symmetry;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) throw ParseError(path, 0, "cannot open file");
  }

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return true;
    }
    return false;
  }

  /// Next line that is neither a comment nor blank.
  bool next_data(std::string& line) {
    while (next(line)) {
      auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '%') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(path_, line_no_, message);
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

Header parse_header(LineReader& reader) {
  std::string line;
  if (!reader.next(line)) reader.fail("empty file");
  std::istringstream ss(line);
  std::string banner, object, format, field, symmetry;
  ss >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") reader.fail("missing %%MatrixMarket banner");
  if (lower(object) != "matrix") reader.fail("unsupported object '" + object + "'");
  Header h{};
  const std::string fmt = lower(format);
  if (fmt == "coordinate") {
    h.layout = Layout::Coordinate;
  } else if (fmt == "array") {
    h.layout = Layout::Array;
  } else {
    reader.fail("unsupported format '" + format + "'");
  }
  if (lower(field) != "real") reader.fail("unsupported field '" + field + "' (only real)");
  const std::string sym = lower(symmetry);
  if (sym == "general") {
    h.symmetry = MatrixMarketSymmetry::General;
  } else if (sym == "symmetric") {
    h.symmetry = MatrixMarketSymmetry::Symmetric;
  } else {
    reader.fail("unsupported symmetry '" + symmetry + "'");
  }
  return h;
}

class Tokens {
 public:
  Tokens(const std::string& line, const LineReader& reader) : rest_(line), reader_(reader) {}

  template <typename T>
  T next(const char* what) {
    skip_ws();
    if (rest_.empty()) reader_.fail(std::string("missing ") + what);
    T value{};
    auto [ptr, ec] = std::from_chars(rest_.data(), rest_.data() + rest_.size(), value);
    if (ec != std::errc() || (ptr != rest_.data() + rest_.size() && !std::isspace(*ptr))) {
      reader_.fail(std::string("malformed ") + what);
    }
    rest_.remove_prefix(static_cast<std::size_t>(ptr - rest_.data()));
    return value;
  }

  void expect_end() {
    skip_ws();
    if (!rest_.empty()) reader_.fail("trailing characters");
  }

 private:
  void skip_ws() {
    while (!rest_.empty() && std::isspace(static_cast<unsigned char>(rest_.front()))) {
      rest_.remove_prefix(1);
    }
  }

  std::string_view rest_;
  const LineReader& reader_;
};

void write_double(std::ostream& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
  out.write(buf, ptr - buf);
}

}  // namespace

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  LineReader reader(path);
  const Header h = parse_header(reader);
  if (h.layout != Layout::Coordinate) reader.fail("matrix files must use coordinate format");
  std::string line;
  if (!reader.next_data(line)) reader.fail("missing size line");
  Tokens size_line(line, reader);
  const auto n_rows = size_line.next<long long>("row count");
  const auto n_cols = size_line.next<long long>("column count");
  const auto n_entries = size_line.next<long long>("entry count");
  size_line.expect_end();
  if (n_rows < 0 || n_cols < 0 || n_entries < 0) reader.fail("negative size");
  if (h.symmetry == MatrixMarketSymmetry::Symmetric && n_rows != n_cols) {
    reader.fail("symmetric matrix must be square");
  }

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(n_entries) *
                   (h.symmetry == MatrixMarketSymmetry::Symmetric ? 2 : 1));
  for (long long e = 0; e < n_entries; ++e) {
    if (!reader.next_data(line)) reader.fail("file ends after " + std::to_string(e) + " entries");
    Tokens t(line, reader);
    const auto i = t.next<long long>("row index");
    const auto j = t.next<long long>("column index");
    const auto v = t.next<double>("value");
    t.expect_end();
    if (i < 1 || i > n_rows || j < 1 || j > n_cols) {
      reader.fail("index (" + std::to_string(i) + ", " + std::to_string(j) +
                  ") outside declared size " + std::to_string(n_rows) + "x" +
                  std::to_string(n_cols));
    }
    const auto r = static_cast<Index>(i - 1);
    const auto c = static_cast<Index>(j - 1);
    triplets.push_back({r, c, v});
    if (h.symmetry == MatrixMarketSymmetry::Symmetric && r != c) triplets.push_back({c, r, v});
  }
  if (reader.next_data(line)) reader.fail("more entries than declared");
  return SparseMatrix::from_triplets(static_cast<Index>(n_rows), static_cast<Index>(n_cols),
                                     std::move(triplets));
}

Vector read_matrix_market_vector(const std::filesystem::path& path) {
  LineReader reader(path);
  const Header h = parse_header(reader);
  if (h.symmetry != MatrixMarketSymmetry::General) reader.fail("vectors must be general");
  std::string line;
  if (!reader.next_data(line)) reader.fail("missing size line");
  Tokens size_line(line, reader);
  const auto n_rows = size_line.next<long long>("row count");
  const auto n_cols = size_line.next<long long>("column count");
  if (n_cols != 1) reader.fail("vector files must have exactly one column");
  if (n_rows < 0) reader.fail("negative size");
  Vector v(static_cast<std::size_t>(n_rows), 0.0);
  if (h.layout == Layout::Array) {
    size_line.expect_end();
    for (long long i = 0; i < n_rows; ++i) {
      if (!reader.next_data(line)) reader.fail("file ends after " + std::to_string(i) + " values");
      Tokens t(line, reader);
      v[i] = t.next<double>("value");
      t.expect_end();
    }
  } else {
    const auto n_entries = size_line.next<long long>("entry count");
    size_line.expect_end();
    for (long long e = 0; e < n_entries; ++e) {
      if (!reader.next_data(line)) reader.fail("file ends early");
      Tokens t(line, reader);
      const auto i = t.next<long long>("row index");
      const auto j = t.next<long long>("column index");
      const auto value = t.next<double>("value");
      t.expect_end();
      if (i < 1 || i > n_rows || j != 1) reader.fail("index outside declared size");
      v[i - 1] += value;
    }
  }
  if (reader.next_data(line)) reader.fail("more values than declared");
  return v;
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a,
                         MatrixMarketSymmetry symmetry) {
  const bool lower_only = symmetry == MatrixMarketSymmetry::Symmetric;
  if (lower_only && (a.rows() != a.cols() || a.max_asymmetry() != 0.0)) {
    throw std::invalid_argument("write_matrix_market: symmetric layout needs a symmetric matrix");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  std::size_t count = 0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index c : a.row_cols(i)) count += !lower_only || c <= i;
  }
  out << "%%MatrixMarket matrix coordinate real " << (lower_only ? "symmetric" : "general")
      << "\n";
  out << a.rows() << " " << a.cols() << " " << count << "\n";
  for (Index i = 0; i < a.rows(); ++i) {
    auto rc = a.row_cols(i);
    auto rv = a.row_values(i);
    for (std::size_t k = 0; k < rc.size(); ++k) {
      if (lower_only && rc[k] > i) break;
      out << i + 1 << " " << rc[k] + 1 << " ";
      write_double(out, rv[k]);
      out << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_matrix_market_vector(const std::filesystem::path& path, std::span<const double> v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  for (double x : v) {
    write_double(out, x);
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace igamg
