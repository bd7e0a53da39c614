#include "srpca/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace srpca {
namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool is_missing_token(const std::string& t) {
  return t.empty() || t == "nan" || t == "NaN" || t == "NAN";
}

double parse_double(const std::string& token, const std::string& origin,
                    std::size_t row, std::size_t col) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << origin << ": row " << row << ", column " << col
        << ": not a number: '" << token << "'";
    throw ParseError(msg.str());
  }
  return value;
}

std::ifstream open_input(const std::string& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw IoError(path + ": cannot open for reading");
  return in;
}

std::ofstream open_output(const std::string& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw IoError(path + ": cannot open for writing");
  return out;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ObservedMatrix load_csv(std::istream& in, const std::string& origin) {
  std::vector<std::vector<double>> values;
  std::vector<std::vector<bool>> observed;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<double> row_values;
    std::vector<bool> row_mask;
    std::size_t start = 0;
    std::size_t col = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      const std::string raw =
          comma == std::string::npos ? line.substr(start)
                                     : line.substr(start, comma - start);
      const std::string token = trim(raw);
      ++col;
      if (is_missing_token(token)) {
        row_values.push_back(0.0);
        row_mask.push_back(false);
      } else {
        row_values.push_back(parse_double(token, origin, row, col));
        row_mask.push_back(true);
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!values.empty() && row_values.size() != values.front().size()) {
      std::ostringstream msg;
      msg << origin << ": row " << row << " has " << row_values.size()
          << " fields, expected " << values.front().size();
      throw ParseError(msg.str());
    }
    values.push_back(std::move(row_values));
    observed.push_back(std::move(row_mask));
  }
  if (values.empty()) throw ParseError(origin + ": no rows");

  ObservedMatrix x;
  const Index m = static_cast<Index>(values.size());
  const Index n = static_cast<Index>(values.front().size());
  x.values = Matrix::Zero(m, n);
  x.mask = Mask::Constant(m, n, false);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) {
      x.values(i, j) = values[i][j];
      x.mask(i, j) = observed[i][j];
    }
  x.validate();
  return x;
}

ObservedMatrix load_csv(const std::string& path) {
  std::ifstream in = open_input(path, std::ios::in);
  return load_csv(in, path);
}

void save_csv(const std::string& path, const ObservedMatrix& x) {
  std::ofstream out = open_output(path, std::ios::out);
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (j > 0) out << ',';
      if (x.mask(i, j)) out << format_value(x.values(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError(path + ": write failed");
}

void save_csv(const std::string& path, const Matrix& m) {
  save_csv(path, ObservedMatrix::dense(m));
}

namespace {

// Reads the next header token, skipping whitespace and '#' comment lines.
std::string pgm_token(std::istream& in, const std::string& origin) {
  int c = in.get();
  for (;;) {
    while (c != EOF && std::isspace(c)) c = in.get();
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
      continue;
    }
    break;
  }
  if (c == EOF) throw ParseError(origin + ": truncated header");
  std::string token;
  while (c != EOF && !std::isspace(c) && c != '#') {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  // Leave the terminating byte unread so the raster separator check after
  // the maxval token sees it.
  if (c != EOF) in.unget();
  return token;
}

long pgm_int(std::istream& in, const std::string& origin, const char* what,
             long lo, long hi) {
  const std::string token = pgm_token(in, origin);
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (end == token.c_str() || *end != '\0' || v < lo || v > hi) {
    std::ostringstream msg;
    msg << origin << ": bad " << what << ": '" << token << "'";
    throw ParseError(msg.str());
  }
  return v;
}

struct RawPgm {
  Matrix pixels;
  int maxval = 0;
};

RawPgm read_pgm(const std::string& path) {
  std::ifstream in = open_input(path, std::ios::in | std::ios::binary);
  const std::string magic = pgm_token(in, path);
  if (magic != "P2" && magic != "P5")
    throw ParseError(path + ": not a P2/P5 graymap (magic '" + magic + "')");
  const bool binary = magic == "P5";
  const long width = pgm_int(in, path, "width", 1, 1 << 20);
  const long height = pgm_int(in, path, "height", 1, 1 << 20);
  const long maxval = pgm_int(in, path, "maxval", 1, 65535);

  RawPgm out;
  out.maxval = static_cast<int>(maxval);
  out.pixels.resize(height, width);
  if (binary) {
    // Exactly one whitespace byte separates the header from the raster.
    const int sep = in.get();
    if (sep == EOF || !std::isspace(sep))
      throw ParseError(path + ": missing raster separator");
    const int bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raster(
        static_cast<std::size_t>(width) * height * bytes);
    in.read(reinterpret_cast<char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
    if (in.gcount() != static_cast<std::streamsize>(raster.size()))
      throw ParseError(path + ": truncated raster");
    std::size_t at = 0;
    for (long i = 0; i < height; ++i)
      for (long j = 0; j < width; ++j) {
        long v = raster[at++];
        if (bytes == 2) v = (v << 8) | raster[at++];
        if (v > maxval) {
          std::ostringstream msg;
          msg << path << ": pixel (" << i << ", " << j << ") value " << v
              << " exceeds maxval " << maxval;
          throw ParseError(msg.str());
        }
        out.pixels(i, j) = static_cast<double>(v);
      }
  } else {
    for (long i = 0; i < height; ++i)
      for (long j = 0; j < width; ++j)
        out.pixels(i, j) =
            static_cast<double>(pgm_int(in, path, "pixel", 0, maxval));
  }
  return out;
}

}  // namespace

PgmImage load_pgm(const std::string& path, const std::string& mask_path) {
  const RawPgm raw = read_pgm(path);
  PgmImage image;
  image.maxval = raw.maxval;
  image.data.values = raw.pixels;
  image.data.mask = Mask::Constant(raw.pixels.rows(), raw.pixels.cols(), true);

  if (!mask_path.empty()) {
    const RawPgm mask = read_pgm(mask_path);
    if (mask.pixels.rows() != raw.pixels.rows() ||
        mask.pixels.cols() != raw.pixels.cols()) {
      std::ostringstream msg;
      msg << mask_path << ": mask is " << mask.pixels.rows() << "x"
          << mask.pixels.cols() << ", image is " << raw.pixels.rows() << "x"
          << raw.pixels.cols();
      throw ParseError(msg.str());
    }
    for (Index i = 0; i < image.data.rows(); ++i)
      for (Index j = 0; j < image.data.cols(); ++j)
        if (mask.pixels(i, j) == 0) {
          image.data.mask(i, j) = false;
          image.data.values(i, j) = 0.0;
        }
  }
  image.data.validate();
  return image;
}

void save_pgm(const std::string& path, const Matrix& m, int maxval) {
  if (maxval < 1 || maxval > 65535)
    throw std::invalid_argument("save_pgm: maxval must be in [1, 65535]");
  std::ofstream out = open_output(path, std::ios::out | std::ios::binary);
  out << "P5\n" << m.cols() << ' ' << m.rows() << '\n' << maxval << '\n';
  const int bytes = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raster;
  raster.reserve(static_cast<std::size_t>(m.size()) * bytes);
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      double v = std::round(m(i, j));
      if (v < 0) v = 0;
      if (v > maxval) v = maxval;
      const long pixel = static_cast<long>(v);
      if (bytes == 2) raster.push_back(static_cast<unsigned char>(pixel >> 8));
      raster.push_back(static_cast<unsigned char>(pixel & 0xff));
    }
  out.write(reinterpret_cast<const char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
  if (!out) throw IoError(path + ": write failed");
}

MovielensData load_movielens(std::istream& in, const std::string& origin) {
  struct Entry {
    long user;
    long item;
    double rating;
  };
  std::vector<Entry> entries;
  long max_user = 0;
  long max_item = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    long user = 0;
    long item = 0;
    double rating = 0;
    std::string timestamp;
    if (!(fields >> user >> item >> rating >> timestamp)) {
      std::ostringstream msg;
      msg << origin << ": line " << lineno
          << ": expected 'user item rating timestamp', got '" << line << "'";
      throw ParseError(msg.str());
    }
    std::string extra;
    if (fields >> extra) {
      std::ostringstream msg;
      msg << origin << ": line " << lineno << ": trailing field '" << extra
          << "'";
      throw ParseError(msg.str());
    }
    if (user < 1 || item < 1 || user > 1000000 || item > 1000000) {
      std::ostringstream msg;
      msg << origin << ": line " << lineno << ": id out of range (user "
          << user << ", item " << item << ")";
      throw ParseError(msg.str());
    }
    if (!std::isfinite(rating)) {
      std::ostringstream msg;
      msg << origin << ": line " << lineno << ": non-finite rating";
      throw ParseError(msg.str());
    }
    entries.push_back({user, item, rating});
    max_user = std::max(max_user, user);
    max_item = std::max(max_item, item);
  }
  if (entries.empty()) throw ParseError(origin + ": no ratings");

  MovielensData data;
  data.matrix.values = Matrix::Zero(max_item, max_user);
  data.matrix.mask = Mask::Constant(max_item, max_user, false);
  for (const Entry& e : entries) {
    const Index i = static_cast<Index>(e.item - 1);
    const Index j = static_cast<Index>(e.user - 1);
    if (data.matrix.mask(i, j)) ++data.duplicate_count;
    data.matrix.mask(i, j) = true;
    data.matrix.values(i, j) = e.rating;
  }
  return data;
}

MovielensData load_movielens(const std::string& path) {
  std::ifstream in = open_input(path, std::ios::in);
  return load_movielens(in, path);
}

std::uint64_t fingerprint(const ObservedMatrix& x) {
  constexpr std::uint64_t kOffset = 14695981039346656037ULL;
  constexpr std::uint64_t kPrime = 1099511628211ULL;
  std::uint64_t hash = kOffset;
  const auto mix_byte = [&hash](unsigned char b) {
    hash ^= b;
    hash *= kPrime;
  };
  const auto mix_u64 = [&mix_byte](std::uint64_t v) {
    for (int k = 0; k < 8; ++k) mix_byte(static_cast<unsigned char>(v >> (8 * k)));
  };
  mix_u64(static_cast<std::uint64_t>(x.rows()));
  mix_u64(static_cast<std::uint64_t>(x.cols()));
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < x.rows(); ++i) {
      mix_byte(x.mask(i, j) ? 1 : 0);
      if (x.mask(i, j)) {
        std::uint64_t bits;
        const double v = x.values(i, j);
        std::memcpy(&bits, &v, sizeof(bits));
        mix_u64(bits);
      }
    }
  return hash;
}

}  // namespace srpca
