#ifndef SRPCA_IO_HPP
#define SRPCA_IO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "srpca/types.hpp"

namespace srpca {

// CSV of doubles, one matrix row per line. Empty fields and the tokens
// nan / NaN / NAN mark missing cells. Ragged rows throw ParseError.
ObservedMatrix load_csv(const std::string& path);
ObservedMatrix load_csv(std::istream& in, const std::string& origin);

// Writes %.17g values; unobserved cells become empty fields.
void save_csv(const std::string& path, const ObservedMatrix& x);
void save_csv(const std::string& path, const Matrix& m);

struct PgmImage {
  ObservedMatrix data;
  int maxval = 255;
};

// Portable graymap, P2 (ASCII) or P5 (binary), maxval up to 65535. All
// pixels load as observed unless mask_path names a second PGM of the same
// size whose zero pixels mark missing cells.
PgmImage load_pgm(const std::string& path, const std::string& mask_path = "");

// Saves binary P5, clamping to [0, maxval] and rounding to nearest.
void save_pgm(const std::string& path, const Matrix& m, int maxval = 255);

struct MovielensData {
  ObservedMatrix matrix;  // rows = movies, cols = users
  Index duplicate_count = 0;
};

// Tab-separated "user item rating timestamp" lines. Dimensions come from
// the largest ids seen; repeated (user, item) pairs keep the last rating
// and bump duplicate_count.
MovielensData load_movielens(const std::string& path);
MovielensData load_movielens(std::istream& in, const std::string& origin);

// FNV-1a 64 over a canonical byte stream: rows and cols as little-endian
// int64, then cells in column-major order, each contributing an observed
// flag byte plus, when observed, the value's 8 bytes little-endian.
std::uint64_t fingerprint(const ObservedMatrix& x);

}  // namespace srpca

#endif
