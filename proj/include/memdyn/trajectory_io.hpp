#ifndef MEMDYN_TRAJECTORY_IO_HPP_
#define MEMDYN_TRAJECTORY_IO_HPP_

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <ios>
#include <sstream>
#include <string>
#include <vector>

namespace memdyn
{

/**
 * @brief Header of the binary columnar format.
 *
 * Layout (little-endian host order): 8-byte magic "MEMDYNTR", u32 version,
 * u32 column count, u64 params hash, f64 dt, u64 decimation, u64 seed,
 * f64 aux, u64 row count, u32 name-block length, comma-joined column names,
 * then rows of interleaved f64 columns.
 */
struct ColumnarHeader
{
  std::uint64_t params_hash = 0;
  double dt = 0.0;
  std::uint64_t decimation = 1;
  std::uint64_t seed = 0;
  double aux = 0.0;  ///< free slot, e.g. the reference frequency of a slow trajectory
  std::vector<std::string> columns;
  std::uint64_t rows = 0;
};

inline constexpr std::array<char, 8> kColumnarMagic{'M', 'E', 'M', 'D', 'Y', 'N', 'T', 'R'};
inline constexpr std::uint32_t kColumnarVersion = 1;

namespace detail
{

template <typename T>
void put(std::ostream & out, const T & v)
{
  out.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T get(std::istream & in)
{
  T v{};
  in.read(reinterpret_cast<char *>(&v), sizeof(T));
  if (!in) {
    throw std::ios_base::failure("truncated columnar file");
  }
  return v;
}

}  // namespace detail

/// Streams rows to disk; the row count is patched in on close().
class ColumnarWriter
{
public:
  ColumnarWriter(const std::string & path, ColumnarHeader header)
  : out_(path, std::ios::binary), header_(std::move(header)), path_(path)
  {
    if (!out_) {
      throw std::ios_base::failure("cannot open '" + path + "' for writing");
    }
    std::string names;
    for (std::size_t k = 0; k < header_.columns.size(); ++k) {
      names += (k ? "," : "") + header_.columns[k];
    }
    out_.write(kColumnarMagic.data(), kColumnarMagic.size());
    detail::put(out_, kColumnarVersion);
    detail::put(out_, static_cast<std::uint32_t>(header_.columns.size()));
    detail::put(out_, header_.params_hash);
    detail::put(out_, header_.dt);
    detail::put(out_, header_.decimation);
    detail::put(out_, header_.seed);
    detail::put(out_, header_.aux);
    rows_pos_ = out_.tellp();
    detail::put(out_, std::uint64_t{0});
    detail::put(out_, static_cast<std::uint32_t>(names.size()));
    out_.write(names.data(), static_cast<std::streamsize>(names.size()));
  }

  ColumnarWriter(const ColumnarWriter &) = delete;
  ColumnarWriter & operator=(const ColumnarWriter &) = delete;

  ~ColumnarWriter()
  {
    try {
      close();
    } catch (...) {
    }
  }

  void row(const double * values)
  {
    out_.write(reinterpret_cast<const char *>(values),
               static_cast<std::streamsize>(sizeof(double) * header_.columns.size()));
    ++header_.rows;
  }

  void row(const std::vector<double> & values) { row(values.data()); }

  void close()
  {
    if (!out_.is_open()) {
      return;
    }
    out_.seekp(rows_pos_);
    detail::put(out_, header_.rows);
    out_.close();
    if (out_.fail()) {
      throw std::ios_base::failure("write failed on '" + path_ + "'");
    }
  }

private:
  std::ofstream out_;
  ColumnarHeader header_;
  std::string path_;
  std::streampos rows_pos_{};
};

struct ColumnarData
{
  ColumnarHeader header;
  std::vector<double> values;  ///< row-major, rows x columns

  double at(std::size_t row, std::size_t col) const { return values[row * header.columns.size() + col]; }
};

inline ColumnarData read_columnar(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::ios_base::failure("cannot open '" + path + "'");
  }
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kColumnarMagic) {
    throw std::ios_base::failure("'" + path + "' is not a columnar trajectory file");
  }
  ColumnarData d;
  if (detail::get<std::uint32_t>(in) != kColumnarVersion) {
    throw std::ios_base::failure("'" + path + "': unsupported version");
  }
  const auto ncols = detail::get<std::uint32_t>(in);
  d.header.params_hash = detail::get<std::uint64_t>(in);
  d.header.dt = detail::get<double>(in);
  d.header.decimation = detail::get<std::uint64_t>(in);
  d.header.seed = detail::get<std::uint64_t>(in);
  d.header.aux = detail::get<double>(in);
  d.header.rows = detail::get<std::uint64_t>(in);
  const auto name_len = detail::get<std::uint32_t>(in);
  std::string names(name_len, '\0');
  in.read(names.data(), name_len);
  std::stringstream ss(names);
  for (std::string c; std::getline(ss, c, ',');) {
    d.header.columns.push_back(c);
  }
  if (d.header.columns.size() != ncols) {
    throw std::ios_base::failure("'" + path + "': column header mismatch");
  }
  d.values.resize(static_cast<std::size_t>(d.header.rows) * ncols);
  in.read(reinterpret_cast<char *>(d.values.data()), static_cast<std::streamsize>(sizeof(double) * d.values.size()));
  if (!in) {
    throw std::ios_base::failure("'" + path + "': truncated data");
  }
  return d;
}

}  // namespace memdyn

#endif  // MEMDYN_TRAJECTORY_IO_HPP_
