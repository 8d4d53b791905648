#include "kdt/codec.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace kdt {

namespace {

void encode_rec(const TreeStore& s, NodeRef n, TreeCode& out) {
  switch (s.tag(n)) {
    case Tag::White:
      out.code.push_back('0');
      break;
    case Tag::Black:
      out.code.push_back('1');
      break;
    case Tag::BlackVal:
      out.code.push_back('1');
      out.values.push_back(s.value(n));
      break;
    default:
      out.code.push_back('2');
      encode_rec(s, s.left(n), out);
      encode_rec(s, s.right(n), out);
  }
}

NodeRef decode_rec(TreeStore& s, const TreeCode& tc, std::size_t& pos, std::size_t& vpos,
                   bool valued) {
  if (pos >= tc.code.size()) fail(Errc::MalformedCode, "truncated code");
  char c = tc.code[pos++];
  switch (c) {
    case '0':
      return s.white();
    case '1':
      if (!valued) return s.black();
      if (vpos >= tc.values.size()) fail(Errc::MalformedCode, "missing functional value");
      return s.black_val(tc.values[vpos++]);
    case '2': {
      NodeRef l = decode_rec(s, tc, pos, vpos, valued);
      NodeRef r = decode_rec(s, tc, pos, vpos, valued);
      return valued ? s.internal_val(l, r) : s.internal(l, r);
    }
    default:
      fail(Errc::MalformedCode, "unexpected code symbol");
  }
}

} // namespace

TreeCode encode(const TreeStore& s, NodeRef root) {
  TreeCode out;
  encode_rec(s, root, out);
  return out;
}

NodeRef decode(TreeStore& s, const TreeCode& tc) {
  std::size_t pos = 0, vpos = 0;
  bool valued = !tc.values.empty();
  NodeRef root = decode_rec(s, tc, pos, vpos, valued);
  if (pos != tc.code.size()) fail(Errc::MalformedCode, "trailing symbols after code");
  if (vpos != tc.values.size()) fail(Errc::MalformedCode, "surplus functional values");
  return root;
}

void write_kdt(std::ostream& out, const TreeStore& s, const SpaceSpec& sp, NodeRef root) {
  TreeCode tc = encode(s, root);
  out << "KDT1 k=" << sp.k << " r=" << sp.r << " valued=" << (tc.values.empty() ? 0 : 1) << "\n";
  out << tc.code << "\n";
  if (!tc.values.empty()) {
    char buf[64];
    for (std::size_t i = 0; i < tc.values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", tc.values[i]);
      if (i) out << ' ';
      out << buf;
    }
    out << "\n";
  }
}

NodeRef read_kdt(std::istream& in, TreeStore& s, SpaceSpec& sp) {
  std::string header;
  if (!std::getline(in, header)) fail(Errc::BadFormat, "empty archive");
  int k = 0, r = 0, valued = 0;
  if (std::sscanf(header.c_str(), "KDT1 k=%d r=%d valued=%d", &k, &r, &valued) != 3)
    fail(Errc::BadFormat, "bad archive header");
  sp = SpaceSpec(k, r);
  TreeCode tc;
  if (!std::getline(in, tc.code)) fail(Errc::BadFormat, "missing code line");
  if (valued) {
    std::string line;
    if (!std::getline(in, line)) fail(Errc::BadFormat, "missing value line");
    std::istringstream vs(line);
    double v;
    while (vs >> v) tc.values.push_back(v);
  }
  return decode(s, tc);
}

void write_kdt_file(const std::string& path, const TreeStore& s, const SpaceSpec& sp,
                    NodeRef root) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::FileNotFound, "cannot open " + path + " for writing");
  write_kdt(out, s, sp, root);
}

NodeRef read_kdt_file(const std::string& path, TreeStore& s, SpaceSpec& sp) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::FileNotFound, "cannot open " + path);
  return read_kdt(in, s, sp);
}

} // namespace kdt
