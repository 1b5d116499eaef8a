#include "tca/npy.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace tca {

namespace {

constexpr char kMagic[6] = {'\x93', 'N', 'U', 'M', 'P', 'Y'};

struct Header {
  std::string descr;
  bool fortran_order = false;
  std::vector<std::size_t> shape;
};

void read_exact(std::ifstream& in, char* buf, std::size_t n, const std::string& path) {
  in.read(buf, static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    raise(errc::io_error, "unexpected end of file in " + path);
}

std::string dict_value(const std::string& dict, const std::string& key,
                       const std::string& path) {
  std::size_t at = dict.find("'" + key + "'");
  if (at == std::string::npos)
    raise(errc::io_error, "header of " + path + " lacks '" + key + "'");
  std::size_t colon = dict.find(':', at);
  if (colon == std::string::npos) raise(errc::io_error, "malformed header in " + path);
  std::size_t begin = dict.find_first_not_of(" \t", colon + 1);
  if (begin == std::string::npos) raise(errc::io_error, "malformed header in " + path);
  std::size_t end;
  if (dict[begin] == '\'') {
    end = dict.find('\'', begin + 1);
    if (end == std::string::npos) raise(errc::io_error, "malformed header in " + path);
    return dict.substr(begin + 1, end - begin - 1);
  }
  if (dict[begin] == '(') {
    end = dict.find(')', begin);
    if (end == std::string::npos) raise(errc::io_error, "malformed header in " + path);
    return dict.substr(begin, end - begin + 1);
  }
  end = dict.find_first_of(",}", begin);
  if (end == std::string::npos) raise(errc::io_error, "malformed header in " + path);
  std::size_t last = dict.find_last_not_of(" \t", end - 1);
  return dict.substr(begin, last - begin + 1);
}

Header parse_header(std::ifstream& in, const std::string& path) {
  char magic[6];
  read_exact(in, magic, 6, path);
  if (std::memcmp(magic, kMagic, 6) != 0)
    raise(errc::bad_magic, path + " is not an npy file");

  unsigned char version[2];
  read_exact(in, reinterpret_cast<char*>(version), 2, path);
  std::size_t header_len = 0;
  if (version[0] == 1) {
    unsigned char len[2];
    read_exact(in, reinterpret_cast<char*>(len), 2, path);
    header_len = static_cast<std::size_t>(len[0]) | (static_cast<std::size_t>(len[1]) << 8);
  } else if (version[0] == 2) {
    unsigned char len[4];
    read_exact(in, reinterpret_cast<char*>(len), 4, path);
    header_len = static_cast<std::size_t>(len[0]) | (static_cast<std::size_t>(len[1]) << 8) |
                 (static_cast<std::size_t>(len[2]) << 16) |
                 (static_cast<std::size_t>(len[3]) << 24);
  } else {
    raise(errc::io_error,
          "unsupported npy version " + std::to_string(version[0]) + "." +
              std::to_string(version[1]) + " in " + path);
  }

  std::string dict(header_len, '\0');
  read_exact(in, dict.data(), header_len, path);

  Header header;
  header.descr = dict_value(dict, "descr", path);
  std::string fortran = dict_value(dict, "fortran_order", path);
  if (fortran == "True") header.fortran_order = true;
  else if (fortran != "False")
    raise(errc::io_error, "malformed fortran_order in " + path);

  std::string shape = dict_value(dict, "shape", path);
  // shape looks like "(2, 3)" or "(5,)" or "()"
  std::size_t pos = 1;
  while (pos < shape.size()) {
    while (pos < shape.size() && (shape[pos] == ' ' || shape[pos] == ',')) ++pos;
    if (pos >= shape.size() || shape[pos] == ')') break;
    std::size_t digits = 0;
    unsigned long long dim = std::stoull(shape.substr(pos), &digits);
    header.shape.push_back(static_cast<std::size_t>(dim));
    pos += digits;
  }
  return header;
}

std::size_t element_count(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

void check_c_order(const Header& header, const std::string& path) {
  if (header.fortran_order)
    raise(errc::fortran_order_unsupported, path + " is Fortran-ordered");
}

void append_u16_le(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::string shape_tuple(const std::vector<std::size_t>& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  if (shape.size() == 1) out += ",";
  out += ")";
  return out;
}

std::string build_header(const std::string& descr, const std::vector<std::size_t>& shape) {
  std::string dict = "{'descr': '" + descr + "', 'fortran_order': False, 'shape': " +
                     shape_tuple(shape) + ", }";
  // magic(6) + version(2) + len(2) + dict + padding + '\n', multiple of 64
  std::size_t unpadded = 10 + dict.size() + 1;
  std::size_t padded = (unpadded + 63) / 64 * 64;
  dict.append(padded - unpadded, ' ');
  dict.push_back('\n');

  std::string out(kMagic, 6);
  out.push_back('\x01');
  out.push_back('\x00');
  append_u16_le(out, static_cast<std::uint16_t>(dict.size()));
  out += dict;
  return out;
}

void write_file(const std::string& path, const std::string& header,
                const char* payload, std::size_t payload_size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(errc::io_error, "cannot open " + path + " for writing");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(payload, static_cast<std::streamsize>(payload_size));
  if (!out) raise(errc::io_error, "short write to " + path);
}

}  // namespace

NpyArray read_npy(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_error, "cannot open " + path);
  Header header = parse_header(in, path);
  check_c_order(header, path);

  bool is_f8 = header.descr == "<f8";
  bool is_f4 = header.descr == "<f4";
  if (!is_f8 && !is_f4)
    raise(errc::unsupported_dtype,
          "dtype '" + header.descr + "' in " + path + " (need '<f4' or '<f8')");

  NpyArray array;
  array.shape = header.shape;
  array.dtype = header.descr;
  std::size_t n = element_count(header.shape);
  array.data.resize(n);

  if (is_f8) {
    std::vector<unsigned char> raw(n * 8);
    read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size(), path);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t bits = 0;
      for (int b = 7; b >= 0; --b) bits = (bits << 8) | raw[i * 8 + static_cast<std::size_t>(b)];
      array.data[i] = std::bit_cast<double>(bits);
    }
  } else {
    std::vector<unsigned char> raw(n * 4);
    read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size(), path);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t bits = 0;
      for (int b = 3; b >= 0; --b) bits = (bits << 8) | raw[i * 4 + static_cast<std::size_t>(b)];
      array.data[i] = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return array;
}

void write_npy(const std::string& path, const std::vector<std::size_t>& shape,
               const std::vector<double>& data) {
  if (shape.empty())
    raise(errc::invalid_argument, "refusing to write a 0-d array to " + path);
  if (element_count(shape) != data.size())
    raise(errc::length_mismatch, "shape wants " + std::to_string(element_count(shape)) +
                                     " values, got " + std::to_string(data.size()));

  std::string header = build_header("<f8", shape);
  std::string payload(data.size() * 8, '\0');
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(data[i]);
    for (std::size_t b = 0; b < 8; ++b)
      payload[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  write_file(path, header, payload.data(), payload.size());
}

std::vector<bool> read_npy_bool(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_error, "cannot open " + path);
  Header header = parse_header(in, path);
  check_c_order(header, path);
  if (header.descr != "|b1")
    raise(errc::unsupported_dtype, "dtype '" + header.descr + "' in " + path + " (need '|b1')");
  if (header.shape.size() != 1)
    raise(errc::unsupported_dtype, "boolean mask in " + path + " must be 1-D");

  std::size_t n = header.shape[0];
  std::vector<unsigned char> raw(n);
  read_exact(in, reinterpret_cast<char*>(raw.data()), n, path);
  std::vector<bool> mask(n);
  for (std::size_t i = 0; i < n; ++i) mask[i] = raw[i] != 0;
  return mask;
}

void write_npy_bool(const std::string& path, const std::vector<bool>& mask) {
  std::string header = build_header("|b1", {mask.size()});
  std::string payload(mask.size(), '\0');
  for (std::size_t i = 0; i < mask.size(); ++i) payload[i] = mask[i] ? '\x01' : '\x00';
  write_file(path, header, payload.data(), payload.size());
}

std::vector<std::int64_t> read_npy_int64(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_error, "cannot open " + path);
  Header header = parse_header(in, path);
  check_c_order(header, path);
  bool is_i8 = header.descr == "<i8";
  bool is_i4 = header.descr == "<i4";
  if (!is_i8 && !is_i4)
    raise(errc::unsupported_dtype,
          "dtype '" + header.descr + "' in " + path + " (need '<i4' or '<i8')");
  if (header.shape.size() != 1)
    raise(errc::unsupported_dtype, "label vector in " + path + " must be 1-D");

  std::size_t n = header.shape[0];
  std::size_t width = is_i8 ? 8 : 4;
  std::vector<unsigned char> raw(n * width);
  read_exact(in, reinterpret_cast<char*>(raw.data()), raw.size(), path);
  std::vector<std::int64_t> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    for (std::size_t b = width; b-- > 0;) bits = (bits << 8) | raw[i * width + b];
    if (is_i8) {
      values[i] = static_cast<std::int64_t>(bits);
    } else {
      values[i] = static_cast<std::int32_t>(static_cast<std::uint32_t>(bits));
    }
  }
  return values;
}

}  // namespace tca
