#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "tnsvd/representation.hpp"

namespace tnsvd {

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Hexadecimal floating literal with an unrestricted exponent, e.g. 0x1.8p-1200.
std::string format_hex(const XFloat& x);
std::string format_decimal(const XFloat& x, int digits = 17);
// Hex literals are exact; decimals are rounded once to 53 bits.
XFloat parse_number(const std::string& s);

// BDP v1
//   bdp 1
//   gen <words>                       optional, records how the chain was made
//   factor <k> <lower|upper> <rows> <cols>
//   pair <i> <bar> <off>
// '#' starts a comment.
struct ChainFile {
    BidiagonalProduct<XFloat> chain;
    std::string gen;
};
void write_bdp(std::ostream& out, const BidiagonalProduct<XFloat>& P, const std::string& gen = "");
ChainFile read_bdp(std::istream& in);

// BDR v1
//   bdr 1 <rows> <cols>
//   cell <i> <j> <bar> <off>          omitted cells are {1, 0}
void write_bdr(std::ostream& out, const Repr<XFloat>& R);
Repr<XFloat> read_bdr(std::istream& in);

std::string to_bdp(const BidiagonalProduct<XFloat>& P, const std::string& gen = "");
std::string to_bdr(const Repr<XFloat>& R);
ChainFile bdp_from_string(const std::string& s);
Repr<XFloat> bdr_from_string(const std::string& s);

ChainFile load_bdp(const std::string& path);
Repr<XFloat> load_bdr(const std::string& path);
// write to a temporary next to `path`, then rename over it
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace tnsvd
