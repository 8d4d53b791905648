#include "kdt/interp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kdt/build.hpp"
#include "kdt/codec.hpp"
#include "kdt/error.hpp"
#include "kdt/integral.hpp"
#include "kdt/pyramid.hpp"
#include "kdt/setops.hpp"
#include "kdt/topo.hpp"

namespace fs = std::filesystem;

namespace kdt {

std::string value_type_name(const Value& v) {
  switch (v.index()) {
    case 0: return "integer";
    case 1: return "real";
    case 2: return "boolean";
    case 3: return std::get<TreeVal>(v).pyramid ? "pyramid" : "tree";
    case 4: return "moment list";
    case 5: return "segment forest";
    case 6: return "vector";
    case 7: return "matrix";
    case 8: return "frame";
    case 9: return "polytope";
    default: return "inductive element";
  }
}

namespace {

struct Window {
  GrayImage canvas;
  std::string title = "window";
};

} // namespace

struct Interp::Impl {
  TreeStore store;
  VarTable vars;
  std::vector<std::string> log;
  std::string out_dir;
  std::string base_dir = ".";
  bool keep_going = false;
  bool stopped = false;
  std::map<int, Window> windows;
  int cur_win = 0;
  int emit_seq = 0;

  // --- argument access -----------------------------------------------------

  [[noreturn]] void bad(Errc code, const Command& c, const std::string& what) const {
    fail(code, c.name + ": " + what);
  }

  void need(const Command& c, std::size_t n) const {
    if (c.args.size() != n)
      bad(Errc::ArityMismatch, c,
          "expects " + std::to_string(n) + " arguments, got " + std::to_string(c.args.size()));
  }
  void need_min(const Command& c, std::size_t n) const {
    if (c.args.size() < n)
      bad(Errc::ArityMismatch, c, "expects at least " + std::to_string(n) + " arguments");
  }

  const Value& lookup(const Command& c, const std::string& name) const {
    auto it = vars.find(name);
    if (it == vars.end()) bad(Errc::TypeMismatch, c, "unbound variable '" + name + "'");
    return it->second;
  }

  std::string name_of(const Command& c, std::size_t i) const {
    if (c.args[i].kind != Arg::Kind::Ident)
      bad(Errc::TypeMismatch, c, "argument " + std::to_string(i + 1) + " must be a name");
    return c.args[i].text;
  }

  long long geti(const Command& c, std::size_t i) const {
    const Arg& a = c.args[i];
    if (a.kind == Arg::Kind::Integer) return a.i;
    if (a.kind == Arg::Kind::Ident) {
      const Value& v = lookup(c, a.text);
      if (auto* p = std::get_if<long long>(&v)) return *p;
      if (auto* p = std::get_if<bool>(&v)) return *p ? 1 : 0;
      bad(Errc::TypeMismatch, c, "variable '" + a.text + "' holds " + value_type_name(v) +
                                     ", expected integer");
    }
    bad(Errc::TypeMismatch, c, "argument " + std::to_string(i + 1) + " must be an integer");
  }

  double getr(const Command& c, std::size_t i) const {
    const Arg& a = c.args[i];
    if (a.kind != Arg::Kind::Ident) return a.r;
    const Value& v = lookup(c, a.text);
    if (auto* p = std::get_if<double>(&v)) return *p;
    if (auto* p = std::get_if<long long>(&v)) return double(*p);
    bad(Errc::TypeMismatch, c,
        "variable '" + a.text + "' holds " + value_type_name(v) + ", expected real");
  }

  template <class T>
  const T& getv(const Command& c, std::size_t i, const char* what) const {
    const Value& v = lookup(c, name_of(c, i));
    if (auto* p = std::get_if<T>(&v)) return *p;
    bad(Errc::TypeMismatch, c, "variable '" + c.args[i].text + "' holds " + value_type_name(v) +
                                   ", expected " + what);
  }

  const TreeVal& gettree(const Command& c, std::size_t i) const {
    return getv<TreeVal>(c, i, "tree");
  }

  int getprec(const Command& c, std::size_t i, const SpaceSpec& sp) const {
    long long p = geti(c, i);
    sp.check_precision(int(p));
    return int(p);
  }

  void check_dim(const Command& c, std::size_t i, const SpaceSpec& sp) const {
    if (geti(c, i) != sp.k) bad(Errc::TypeMismatch, c, "dimension does not match the operand");
  }

  std::vector<double> getvec(const Command& c, std::size_t i) const {
    if (c.args[i].kind == Arg::Kind::Ident) {
      const Value& v = lookup(c, c.args[i].text);
      if (auto* p = std::get_if<VectorVal>(&v)) return p->v;
    }
    bad(Errc::TypeMismatch, c, "argument " + std::to_string(i + 1) + " must be a vector");
  }

  std::vector<double> reals(const Command& c, std::size_t from, std::size_t count) const {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = getr(c, from + i);
    return out;
  }

  // --- result binding ------------------------------------------------------

  void bind(const Command& c, Value v) {
    if (c.result.empty()) bad(Errc::TypeMismatch, c, "delivers a result but none is bound");
    vars[c.result] = std::move(v);
  }

  void bind_opt(const Command& c, Value v, const std::string& shown) {
    if (!c.result.empty())
      vars[c.result] = std::move(v);
    else
      log.push_back(c.name + ": " + shown);
  }

  // Tree commands without an explicit result rewrite their operand variable.
  void bind_tree(const Command& c, TreeVal tv, std::size_t src = 0) {
    vars[c.result.empty() ? name_of(c, src) : c.result] = std::move(tv);
  }

  // --- display -------------------------------------------------------------

  Window& window() { return windows[cur_win]; }

  void draw(const TreeVal& tv, int precision) {
    if (tv.space.k != 2) {
      log.push_back("display: only planar sets are rasterized (k=" +
                    std::to_string(tv.space.k) + ")");
      return;
    }
    int side = int(tv.space.cells_per_axis());
    Window& w = window();
    if (w.canvas.width != side) {
      w.canvas.width = w.canvas.height = side;
      w.canvas.pixels.assign(std::size_t(side) * side, 0.0);
    }
    std::uint32_t scale = std::uint32_t(1) << (tv.space.r - precision);
    for (const auto& [cell, value] : labeled_cells(store, tv.space, tv.root, precision))
      for (std::uint32_t dy = 0; dy < scale; ++dy)
        for (std::uint32_t dx = 0; dx < scale; ++dx)
          w.canvas.at(int(cell[0] * scale + dx), int(cell[1] * scale + dy)) = value;
  }

  void emit() {
    Window& w = window();
    if (w.canvas.width == 0) return;
    fs::create_directories(out_dir);
    std::string title;
    for (char ch : w.title) title += std::isalnum(unsigned(ch)) ? ch : '_';
    char seq[8];
    std::snprintf(seq, sizeof seq, "%03d", emit_seq++);
    std::string stem =
        out_dir + "/g" + std::to_string(cur_win) + "_" + seq + "_" + title;
    bool binary_only = true;
    double vmax = 1.0;
    for (double v : w.canvas.pixels) {
      if (v != 0.0 && v != 1.0) binary_only = false;
      vmax = std::max(vmax, v);
    }
    if (binary_only) {
      BitImage img{w.canvas.width, w.canvas.height, {}};
      img.bits.resize(w.canvas.pixels.size());
      for (std::size_t i = 0; i < img.bits.size(); ++i)
        img.bits[i] = w.canvas.pixels[i] > 0 ? 1 : 0;
      write_pbm(stem + ".pbm", img);
      log.push_back("wrote " + stem + ".pbm");
    } else {
      GrayImage img = w.canvas;
      for (double& v : img.pixels) v = v <= 0 ? 0.0 : v / vmax;
      write_pgm(stem + ".pgm", img);
      log.push_back("wrote " + stem + ".pgm");
    }
  }

  // --- io ------------------------------------------------------------------

  std::string resolve(const Command& c, const std::string& name) const {
    for (const std::string& cand :
         {name, name + ".kdt", name + ".pbm", name + ".pgm"}) {
      fs::path p = fs::path(base_dir) / cand;
      if (fs::exists(p)) return p.string();
      if (fs::exists(cand)) return cand;
    }
    bad(Errc::FileNotFound, c, "no file for '" + name + "'");
  }

  TreeVal load(const Command& c, const std::string& name, bool as_pyramid) {
    std::string path = resolve(c, name);
    TreeVal tv;
    if (path.ends_with(".kdt")) {
      tv.root = read_kdt_file(path, store, tv.space);
      tv.pyramid = store.is_valued(tv.root) || as_pyramid;
    } else if (path.ends_with(".pbm")) {
      tv.root = tree_of_bitmap(store, read_pbm(path), &tv.space);
    } else {
      GrayImage img = read_pgm(path);
      if (as_pyramid) {
        tv.root = pyramid_of_image(store, img, &tv.space);
        tv.pyramid = true;
      } else {
        BitImage bits{img.width, img.height, {}};
        bits.bits.resize(img.pixels.size());
        for (std::size_t i = 0; i < bits.bits.size(); ++i)
          bits.bits[i] = img.pixels[i] > 0 ? 1 : 0; // foreground threshold
        tv.root = tree_of_bitmap(store, bits, &tv.space);
      }
    }
    return tv;
  }

  void save(const Command& c, const TreeVal& tv, const std::string& name) {
    fs::create_directories(out_dir);
    std::string path = (fs::path(out_dir) / name).string();
    if (name.ends_with(".pbm")) {
      write_pbm(path, bitmap_of_tree(store, tv.space, tv.root));
    } else if (name.ends_with(".pgm")) {
      write_pgm(path, image_of_pyramid(store, tv.space, tv.root));
    } else {
      if (!name.ends_with(".kdt")) path += ".kdt";
      write_kdt_file(path, store, tv.space, tv.root);
    }
    log.push_back("wrote " + path);
    (void)c;
  }

  // --- shared command helpers ----------------------------------------------

  Metric metric_of(const std::string& name) const {
    return name[2] == '0' ? Metric::Dinf : Metric::D1;
  }

  // (tree, dim, precision) morphology-style commands.
  void unary_tree(const Command& c, NodeRef (*op)(TreeStore&, const SpaceSpec&, NodeRef, Metric,
                                                  int)) {
    need(c, 3);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    tv.root = op(store, tv.space, tv.root, metric_of(c.name), p);
    bind_tree(c, tv);
  }

  void binary_set(const Command& c,
                  NodeRef (*op)(TreeStore&, const SpaceSpec&, NodeRef, NodeRef, int)) {
    need(c, 4);
    TreeVal a = gettree(c, 0), b = gettree(c, 1);
    if (a.space.k != b.space.k) bad(Errc::TypeMismatch, c, "operand dimensions differ");
    SpaceSpec sp(a.space.k, std::max(a.space.r, b.space.r));
    check_dim(c, 2, sp);
    int p = getprec(c, 3, sp);
    TreeVal out{op(store, sp, a.root, b.root, p), sp,
                a.pyramid || b.pyramid};
    bind_tree(c, out);
  }

  MomentsVal centered(const Command& c, MomentsVal mv) const {
    if (!mv.centered) {
      double mass = mv.list.mass();
      if (mass == 0.0) bad(Errc::ZeroMass, c, "empty moment list");
      mv.xg.resize(mv.list.k);
      for (int a = 0; a < mv.list.k; ++a) {
        MultiIndex idx(mv.list.k, 0);
        idx[a] = 1;
        mv.xg[a] = mv.list.at(idx) / mass;
      }
      mv.list = center_moments(mv.list);
      mv.centered = true;
    }
    return mv;
  }

  EigenFrame frame_of(const Command& c, const MomentsVal& raw) const {
    MomentsVal mv = centered(c, raw);
    EigenFrame f = eigen_frame(mv.list);
    f.xg = mv.xg; // the centered list reads a zero gravity center
    return f;
  }

  std::string describe(const Value& v) const {
    std::ostringstream out;
    out << value_type_name(v) << " ";
    switch (v.index()) {
      case 0: out << std::get<long long>(v); break;
      case 1: out << std::get<double>(v); break;
      case 2: out << (std::get<bool>(v) ? "true" : "false"); break;
      case 3: {
        const auto& tv = std::get<TreeVal>(v);
        out << "k=" << tv.space.k << " r=" << tv.space.r << " cells="
            << cell_count(store, tv.space, tv.root, tv.space.r);
        break;
      }
      case 4: {
        std::ostringstream csv;
        write_moments_csv(csv, std::get<MomentsVal>(v).list);
        std::string s = csv.str();
        std::replace(s.begin(), s.end(), '\n', ' ');
        out << s;
        break;
      }
      case 5: out << "of " << std::get<ForestVal>(v).trees.size() << " components"; break;
      case 6: {
        for (double x : std::get<VectorVal>(v).v) out << x << " ";
        break;
      }
      default: break;
    }
    return out.str();
  }

  // --- execution -----------------------------------------------------------

  void dispatch(const Command& c);
  void exec_tree_cmd(const Command& c, const std::string& name);
  bool exec_misc(const Command& c, const std::string& name);
};

namespace {

const std::map<std::string, std::string>& alias_map() {
  static const std::map<std::string, std::string> m = {
      {"KDUNBT", "KDUNIO"}, {"KD0EXP", "KD0DIL"}, {"KD1EXP", "KD1DIL"}, {"KD0CLA", "KD0LAB"},
      {"KD1CLA", "KD1LAB"}, {"KDEMED", "KDMEDS"}, {"KDFTHM", "KDTHOM"}, {"KDMTOP", "KDMTIV"},
      {"KDTRHH", "KDTRHP"}, {"KDFEIT", "KDEIGT"}, {"KDAPRR", "KDAPTR"}, {"KDCPYR", "KDCRPY"},
      {"KDVRCI", "KDIRVC"}, {"KDITSP", "KDITST"}, {"KDDEBT", "KDSUVR"}, {"KDDEDS", "KDSUVR"},
      {"KDCPST", "KDCPVR"}, {"KDCPLI", "KDCPVR"}, {"KDPRPY", "KDPRBT"}, {"KDVPIL", "KDAVIL"},
  };
  return m;
}

const char* kImplemented[] = {
    "KD0ANR", "KD1ANR", "KD0BND", "KD1BND", "KD0CLO", "KD1CLO", "KD0DIL", "KD1DIL", "KD0ERO",
    "KD1ERO", "KD0OPE", "KD1OPE", "KD0MDF", "KD1MDF", "KD0MFP", "KD1MFP", "KD0EXT", "KD1PRL",
    "KD0LAB", "KD1LAB", "KDCCLB", "KDBSGT", "KDEXSG", "KDLLCC", "KDTHIN", "KDMEDS", "KDIDIM",
    "KDSCLO", "KDASS",  "KDNOT",  "KDUNIO", "KDINTR", "KDDIFF", "KDEXCL", "KDHYPG", "KDEPIG",
    "KDFILL", "KDCVXH", "KDIRVC", "KDICVC", "KDCIVR", "KDVBCI", "KDTRAN", "KDSYMT", "KDTHOM",
    "KDMTTR", "KDMTAN", "KDMTRT", "KDMTPR", "KDCMCI", "KDCMTH", "KDMTIV", "KDMTTP", "KDPESP",
    "KDCPOL", "KDTRHP", "KDLOHP", "KDUPHP", "KDCHCI", "KDPOLT", "KDBRLI", "KDSPBT", "KDCOBT",
    "KDRHPD", "KDPLVI", "KDITST", "KDPTTM", "KDCRTM", "KDDETZ", "KDEXSL", "KDINSL", "KDEXTS",
    "KDBTPY", "KDPYBT", "KDSUPY", "KDCOLT", "KDCTDP", "KDSCAL", "KDMAPY", "KDMIPY", "KDDVBT",
    "KDCLAL", "KDCRPY", "KDCTIL", "KDAVIL", "KDAIVT", "KDARVT", "KDARVP", "KDUNIL", "KDINIL",
    "KDDFIL", "KDEXIL", "KDMOMG", "KDCTRM", "KDNRMG", "KDNRMR", "KDAPTR", "KDEIGT", "KDRADT",
    "KDCVMT", "KDINVR", "KDMDVR", "KDCPVR", "KDRNVR", "KDSUVR", "KDEXVR", "KDLSVR", "KDPRVR",
    "KDDCVR", "KDVCVR", "KDTBIN", "KDTBTR", "KDTBTV", "KDTBNV", "KDTPYR", "KDTVAR", "KDEXCI",
    "KDEND",  "KDSTOP", "KDPAUS", "KDLSST", "KDLGST", "KDPRBT", "KDNWGR", "KDERGR", "KDDSGR",
    "KDMSGR", "KDQTGR", "KDPYGR", "KDRDBT", "KDWRBT", "KDRDPY", "KDWRPY", "KDIMPY",
};

const char* kDisplayStubs[] = {
    "KDSWGR", "KDMVGR", "KDWBGR", "KDBLGR", "KDIVGR", "KDRSGR", "KDTRGR", "KDCLGR",
    "KDOPGR", "KDCMAP", "KDDE3D", "KDFI3D", "KDIN3D", "KDINGR", "KDOTGR",
};

// Raw doublet-memory access, container primitives, archives, files and work
// sessions: outside the modeling library proper.
const char* kOutOfScope[] = {
    "KDALLO", "KDFREE", "KDRLFT", "KDRRGT", "KDRLNK", "KDWLFT", "KDWRGT", "KDWLNK", "KDRTYP",
    "KDWTYP", "KDRVAL", "KDWVAL", "KDRCOL", "KDWCOL", "KDRFCT", "KDWFCT", "KDSON",  "KDCRBT",
    "KDFIBT", "KDMERG", "KDDVTN", "KDDRBT", "KDISOC", "KDTERM", "KDNIL",  "KDWHIT", "KDNBLCK",
    "KDCRLS", "KDCRCI", "KDCRQU", "KDCRST", "KDDELS", "KDDECI", "KDDEQU", "KDDEST", "KDINLS",
    "KDINCI", "KDDTQU", "KDDHLS", "KDDTST", "KDPUSH", "KDPOP",  "KDFICI", "KDFIRS", "KDLAST",
    "KDCTST", "KDSULS", "KDEMLS", "KDEMQU", "KDEMST", "KDTLIC", "KDTLIS", "KDPRLC", "KDPRLS",
    "KDANIX", "KDCRIX", "KDHSIX", "KDXTIX", "KDSLIX", "KDCPFL", "KDDCFL", "KDEXFL", "KDINFL",
    "KDLDFL", "KDLSFC", "KDPRFL", "KDRNFC", "KDSUFL", "KDVCFL", "KDPRHI", "KDPRDC", "KDPRWK",
    "KDCRWK", "KDDEWK", "KDINWK", "KDMDWK", "KDRSWK", "KDSTWK", "KDSUWK", "KDLSCN", "KDRPYC",
    "KDHSPY",
};

} // namespace

const std::map<std::string, CmdClass>& command_registry() {
  static const std::map<std::string, CmdClass> reg = [] {
    std::map<std::string, CmdClass> m;
    for (const char* n : kImplemented) m[n] = CmdClass::Implemented;
    for (const char* n : kDisplayStubs) m[n] = CmdClass::DisplayStub;
    for (const char* n : kOutOfScope) m.emplace(n, CmdClass::OutOfScope);
    for (const auto& [from, to] : alias_map()) m[from] = CmdClass::Aliased;
    return m;
  }();
  return reg;
}

// Commands whose first operand is a tree variable.
void Interp::Impl::exec_tree_cmd(const Command& c, const std::string& name) {
  if (name == "KD0ERO" || name == "KD1ERO" || name == "KD0DIL" || name == "KD1DIL" ||
      name == "KD0OPE" || name == "KD1OPE" || name == "KD0CLO" || name == "KD1CLO") {
    need(c, 3);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    MorphOp op = (name.ends_with("ERO"))   ? MorphOp::Erode
                 : (name.ends_with("DIL")) ? MorphOp::Dilate
                 : (name.ends_with("OPE")) ? MorphOp::Open
                                           : MorphOp::Close;
    tv.root = morphology(store, tv.space, tv.root, metric_of(name), op, p);
    bind_tree(c, tv);
  } else if (name == "KD0BND" || name == "KD1BND") {
    unary_tree(c, &boundary);
  } else if (name == "KD0MDF" || name == "KD1MDF") {
    unary_tree(c, &median_filter);
  } else if (name == "KD0MFP" || name == "KD1MFP") {
    need(c, 3);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    getprec(c, 2, tv.space);
    tv.root = pyramid_median_filter(store, tv.space, tv.root, metric_of(name));
    bind_tree(c, tv);
  } else if (name == "KD0EXT" || name == "KD1PRL") {
    need(c, 2);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    tv.root = pyramid_extend(store, tv.space, tv.root, metric_of(name));
    bind_tree(c, tv);
  } else if (name == "KD0ANR" || name == "KD1ANR") {
    need(c, 3);
    const TreeVal& tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    auto adj = adjacencies(store, tv.space, tv.root, metric_of(name), p);
    bind_opt(c, (long long)adj.size(), std::to_string(adj.size()) + " adjacent pairs");
  } else if (name == "KD0LAB" || name == "KD1LAB" || name == "KDCCLB") {
    need_min(c, 1);
    TreeVal tv = gettree(c, 0);
    Metric metric = name == "KDCCLB" ? Metric::D1 : metric_of(name);
    int p = tv.space.r;
    if (c.args.size() >= 3) {
      check_dim(c, 1, tv.space);
      p = getprec(c, 2, tv.space);
    }
    Components comps = components(store, tv.space, tv.root, metric, p, LabelMethod::Bucket);
    tv.root = comps.labeled;
    tv.pyramid = true;
    vars[name_of(c, 0)] = tv;
    bind_opt(c, (long long)comps.count, std::to_string(comps.count) + " components");
  } else if (name == "KDTHIN" || name == "KDMEDS") {
    need(c, 4);
    TreeVal tv = gettree(c, 0);
    // the command names the wanted dimension of the residue; the thinning
    // kernel counts it from the other end (0 erodes down to a hypersurface)
    long long want = geti(c, 1);
    check_dim(c, 2, tv.space);
    int p = getprec(c, 3, tv.space);
    int target = tv.space.k - 1 - int(want);
    if (target < 0 || target >= tv.space.k)
      bad(Errc::AxisOutOfRange, c, "dimension of the residue out of range");
    tv.root = name == "KDTHIN" ? thin_step(store, tv.space, tv.root, target, p).first
                               : median_set(store, tv.space, tv.root, target, p);
    bind_tree(c, tv);
  } else if (name == "KDIDIM") {
    need(c, 3);
    const TreeVal& tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    long long d = intrinsic_dimension(store, tv.space, tv.root, p);
    bind_opt(c, d, "intrinsic dimension " + std::to_string(d));
  } else if (name == "KDSCLO") {
    need(c, 3);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    tv.root = space_closure(store, tv.space, tv.root, p);
    bind_tree(c, tv);
  } else if (name == "KDASS" || name == "KDNOT") {
    need(c, 3);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    tv.root = name == "KDASS" ? assert_at(store, tv.space, tv.root, p)
                              : complement(store, tv.space, tv.root, p);
    if (name == "KDNOT") tv.pyramid = false;
    bind_tree(c, tv);
  } else if (name == "KDUNIO") {
    binary_set(c, &set_union);
  } else if (name == "KDINTR") {
    binary_set(c, &set_intersect);
  } else if (name == "KDDIFF") {
    binary_set(c, &set_diff);
  } else if (name == "KDEXCL") {
    binary_set(c, &set_exclude);
  } else if (name == "KDHYPG" || name == "KDEPIG") {
    need(c, 4);
    TreeVal tv = gettree(c, 0);
    int axis = int(geti(c, 1));
    check_dim(c, 2, tv.space);
    int p = getprec(c, 3, tv.space);
    tv.root = name == "KDHYPG" ? hypograph(store, tv.space, tv.root, axis, p)
                               : epigraph(store, tv.space, tv.root, axis, p);
    bind_tree(c, tv);
  } else if (name == "KDFILL" || name == "KDCVXH") {
    need(c, 3);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    tv.root = name == "KDFILL" ? fill(store, tv.space, tv.root, p)
                               : convex_hull(store, tv.space, tv.root, p);
    bind_tree(c, tv);
  } else {
    bad(Errc::UnknownCommand, c, "no handler");
  }
}

bool Interp::Impl::exec_misc(const Command& c, const std::string& name) {
  // --- vectors and matrices ---
  if (name == "KDIRVC" || name == "KDICVC" || name == "KDVBCI") {
    need_min(c, 2);
    int k = int(geti(c, 0));
    need(c, std::size_t(k) + 1);
    bind(c, VectorVal{reals(c, 1, std::size_t(k))});
  } else if (name == "KDCIVR") {
    need(c, 2);
    int k = int(geti(c, 0));
    bind(c, VectorVal{std::vector<double>(std::size_t(k), getr(c, 1))});
  } else if (name == "KDMTTR" || name == "KDMTAN" || name == "KDMTPR") {
    need_min(c, 2);
    int k = int(geti(c, 0));
    need(c, std::size_t(k) + 1);
    auto v = reals(c, 1, std::size_t(k));
    bind(c, name == "KDMTTR"   ? mat_translation(v)
            : name == "KDMTAN" ? mat_homothety(v)
                               : mat_perspective(v));
  } else if (name == "KDMTRT") {
    need(c, 4);
    bind(c, mat_rotation(int(geti(c, 0)), int(geti(c, 1)), int(geti(c, 2)), getr(c, 3)));
  } else if (name == "KDCMCI") {
    need_min(c, 2);
    int k = int(geti(c, 0));
    std::size_t n = std::size_t(k + 1) * (k + 1);
    need(c, n + 1);
    HomMatrix m = HomMatrix::identity(k);
    m.m = reals(c, 1, n);
    bind(c, m);
  } else if (name == "KDCMTH") {
    need(c, 2);
    bind(c, mat_concat(getv<HomMatrix>(c, 0, "matrix"), getv<HomMatrix>(c, 1, "matrix")));
  } else if (name == "KDMTIV" || name == "KDMTTP") {
    need(c, 1);
    const HomMatrix& m = getv<HomMatrix>(c, 0, "matrix");
    Value out = name == "KDMTIV" ? Value(mat_inverse(m)) : Value(mat_transpose(m));
    vars[c.result.empty() ? name_of(c, 0) : c.result] = std::move(out);
  }
  // --- polytopes and shapes ---
  else if (name == "KDPESP" || name == "KDLOHP" || name == "KDUPHP" || name == "KDCHCI") {
    need(c, 1);
    bind(c, unit_cube(int(geti(c, 0))));
  } else if (name == "KDCPOL") {
    need(c, 2);
    const HomMatrix& m = getv<HomMatrix>(c, 1, "matrix");
    bind(c, polytope_transform(unit_cube(int(geti(c, 0))), m, mat_inverse(m)));
  } else if (name == "KDTRHP") {
    need(c, 2);
    const Polytope& p = getv<Polytope>(c, 0, "polytope");
    const HomMatrix& m = getv<HomMatrix>(c, 1, "matrix");
    Value out = polytope_transform(p, m, mat_inverse(m));
    vars[c.result.empty() ? name_of(c, 0) : c.result] = std::move(out);
  } else if (name == "KDPOLT") {
    need(c, 3);
    const Polytope& poly = getv<Polytope>(c, 0, "polytope");
    SpaceSpec sp(int(geti(c, 1)), int(geti(c, 2)));
    bind(c, TreeVal{polytope_tree(store, sp, poly, sp.r), sp, false});
  } else if (name == "KDBRLI") {
    need_min(c, 4);
    int k = int(geti(c, 0));
    SpaceSpec sp(k, int(geti(c, 1)));
    std::size_t rest = c.args.size() - 2;
    if (rest % std::size_t(k) != 0) bad(Errc::ArityMismatch, c, "coordinate count mismatch");
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < rest / std::size_t(k); ++i)
      pts.push_back(reals(c, 2 + i * std::size_t(k), std::size_t(k)));
    bind(c, TreeVal{shape_broken_line(store, sp, pts, sp.r), sp, false});
  } else if (name == "KDSPBT") {
    need_min(c, 4);
    int k = int(geti(c, 0));
    SpaceSpec sp(k, int(geti(c, 1)));
    need(c, std::size_t(k) + 3);
    bind(c, TreeVal{shape_sphere(store, sp, reals(c, 2, std::size_t(k)),
                                 getr(c, std::size_t(k) + 2), sp.r),
                    sp, false});
  } else if (name == "KDCOBT") {
    need_min(c, 6);
    int k = int(geti(c, 0));
    SpaceSpec sp(k, int(geti(c, 1)));
    need(c, 2 * std::size_t(k) + 4);
    bind(c, TreeVal{shape_cone(store, sp, reals(c, 2, std::size_t(k)),
                               reals(c, 2 + std::size_t(k), std::size_t(k)),
                               getr(c, 2 * std::size_t(k) + 2), getr(c, 2 * std::size_t(k) + 3),
                               sp.r),
                    sp, false});
  }
  // --- geometric transforms ---
  else if (name == "KDTRAN") {
    need(c, 5);
    TreeVal tv = gettree(c, 0);
    auto vec = getvec(c, 1);
    check_dim(c, 2, tv.space);
    int pin = getprec(c, 3, tv.space);
    int pout = getprec(c, 4, tv.space);
    tv.root = tree_translate(store, tv.space, tv.root, vec, pin, pout);
    bind_tree(c, tv);
  } else if (name == "KDSYMT") {
    need(c, 3);
    TreeVal tv = gettree(c, 0);
    int axis = int(geti(c, 1));
    check_dim(c, 2, tv.space);
    tv.root = tree_symmetry(store, tv.space, tv.root, axis);
    bind_tree(c, tv);
  } else if (name == "KDTHOM") {
    need(c, 5);
    TreeVal tv = gettree(c, 0);
    const HomMatrix& m = getv<HomMatrix>(c, 1, "matrix");
    check_dim(c, 2, tv.space);
    int pin = getprec(c, 3, tv.space);
    int pout = getprec(c, 4, tv.space);
    tv.root = tree_transform(store, tv.space, tv.root, m, pin, pout);
    bind_tree(c, tv);
  } else if (name == "KDRHPD") {
    need(c, 4);
    TreeVal tv = gettree(c, 0);
    int axis = int(geti(c, 1));
    Sense sense = geti(c, 2) ? Sense::Decreasing : Sense::Increasing;
    check_dim(c, 3, tv.space);
    tv.root = hidden_part_removal(store, tv.space, tv.root, axis, sense);
    bind_tree(c, tv);
  } else if (name == "KDPLVI") {
    need(c, 3);
    const TreeVal& tv = gettree(c, 0);
    int axis = int(geti(c, 1));
    check_dim(c, 2, tv.space);
    if (tv.space.k < 2) bad(Errc::AxisOutOfRange, c, "projection needs k >= 2");
    bind(c, TreeVal{project(store, tv.space, tv.root, axis),
                    SpaceSpec(tv.space.k - 1, tv.space.r), false});
  } else if (name == "KDITST") {
    need_min(c, 3);
    const TreeVal& tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    std::size_t k = std::size_t(tv.space.k);
    need(c, 3 + 2 * k);
    Segment seg{reals(c, 3, k), reals(c, 3 + k, k)};
    bool hit = segment_intersects(store, tv.space, tv.root, seg, p);
    bind_opt(c, hit, hit ? "segment meets the set" : "segment clears the set");
  } else if (name == "KDEXTS") {
    need_min(c, 3);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    std::size_t k = std::size_t(tv.space.k);
    need(c, 3 + 2 * k);
    Segment seg{reals(c, 3, k), reals(c, 3 + k, k)};
    tv.root = set_intersect(store, tv.space, tv.root,
                            shape_segment(store, tv.space, seg, p), p);
    bind_tree(c, tv);
  } else if (name == "KDPTTM") {
    need_min(c, 3);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    std::size_t k = std::size_t(tv.space.k);
    need(c, 4 + k);
    tv.root = propagation_area(store, tv.space, tv.root, reals(c, 3, k), getr(c, 3 + k), p);
    bind_tree(c, tv);
  } else if (name == "KDCRTM") {
    need_min(c, 4);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    std::size_t k = std::size_t(tv.space.k);
    std::size_t n = std::size_t(geti(c, 3));
    need(c, 5 + n * k);
    NodeRef area = store.white();
    for (std::size_t i = 0; i < n; ++i)
      area = set_union(store, tv.space, area,
                       propagation_area(store, tv.space, tv.root, reals(c, 4 + i * k, k),
                                        getr(c, 4 + n * k), p),
                       p);
    tv.root = area;
    bind_tree(c, tv);
  } else if (name == "KDDETZ") {
    need_min(c, 3);
    const TreeVal& tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    std::size_t k = std::size_t(tv.space.k);
    need(c, 3 + k);
    Cell cell(k);
    for (std::size_t i = 0; i < k; ++i) cell[i] = quantize(getr(c, 3 + i), tv.space.r);
    double v = kNoValue;
    bool black = probe(store, tv.space, tv.root, cell, p, &v);
    double alt = !black ? 0.0 : (v == kNoValue ? 1.0 : v);
    bind_opt(c, alt, "altitude " + std::to_string(alt));
  } else if (name == "KDEXSL") {
    need(c, 5);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    FixedAxes fixed{{int(geti(c, 3)), std::uint32_t(geti(c, 4))}};
    SpaceSpec sub(1, 0);
    NodeRef slice = slice_extract(store, tv.space, tv.root, fixed, p, &sub);
    bind(c, TreeVal{slice, sub, tv.pyramid});
  } else if (name == "KDINSL") {
    need(c, 6);
    TreeVal tv = gettree(c, 0);
    const TreeVal& slice = gettree(c, 1);
    check_dim(c, 2, tv.space);
    int p = getprec(c, 3, tv.space);
    FixedAxes fixed{{int(geti(c, 4)), std::uint32_t(geti(c, 5))}};
    tv.root = slice_insert(store, tv.space, tv.root, slice.root, fixed, p);
    bind_tree(c, tv);
  }
  // --- pyramids ---
  else if (name == "KDBTPY") {
    need(c, 3);
    const TreeVal& tv = gettree(c, 0);
    int axis = int(geti(c, 1));
    check_dim(c, 2, tv.space);
    SpaceSpec sup(1, 0);
    NodeRef p = tree_to_pyramid(store, tv.space, tv.root, axis, &sup);
    bind(c, TreeVal{p, sup, true});
  } else if (name == "KDPYBT") {
    need(c, 2);
    const TreeVal& tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    SpaceSpec out(1, 0);
    NodeRef t = pyramid_to_tree(store, tv.space, tv.root, &out);
    bind(c, TreeVal{t, out, false});
  } else if (name == "KDSUPY") {
    need(c, 3);
    const TreeVal& tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    bind(c, TreeVal{assert_at(store, tv.space, support(store, tv.space, tv.root), p), tv.space,
                    false});
  } else if (name == "KDCOLT") {
    need(c, 4);
    TreeVal tv = gettree(c, 0);
    double value = getr(c, 1);
    check_dim(c, 2, tv.space);
    int p = getprec(c, 3, tv.space);
    tv.root = colorize(store, tv.space, assert_at(store, tv.space, tv.root, p), value);
    tv.pyramid = true;
    bind_tree(c, tv);
  } else if (name == "KDCTDP") {
    need(c, 2);
    const TreeVal& tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    FunctionalStats st = stats(store, tv.space, tv.root);
    std::ostringstream msg;
    msg << "min " << st.fmin << " max " << st.fmax << " center " << st.center << " dispersion "
        << st.dispersion;
    log.push_back(c.name + ": " + msg.str());
    if (!c.result.empty())
      bind(c, VectorVal{{st.fmin, st.fmax, st.center, st.dispersion}});
  } else if (name == "KDSCAL") {
    need_min(c, 2);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    double center, disp;
    if (c.args.size() >= 4) {
      center = getr(c, 2);
      disp = getr(c, 3);
    } else {
      FunctionalStats st = stats(store, tv.space, tv.root);
      center = st.center;
      disp = st.dispersion;
    }
    tv.root = scale(store, tv.space, tv.root, center, disp);
    bind_tree(c, tv);
  } else if (name == "KDMAPY" || name == "KDMIPY") {
    need(c, 2);
    const TreeVal& tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    FunctionalStats st = stats(store, tv.space, tv.root);
    double v = name == "KDMAPY" ? st.fmax : st.fmin;
    bind_opt(c, v, "value " + std::to_string(v));
  } else if (name == "KDDVBT") {
    need(c, 2);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    tv.root = support(store, tv.space, tv.root);
    tv.pyramid = false;
    bind_tree(c, tv);
  } else if (name == "KDCLAL") {
    need(c, 3);
    const TreeVal& alt = gettree(c, 0);
    TreeVal plan = gettree(c, 1);
    check_dim(c, 2, plan.space);
    if (alt.space.k != plan.space.k) bad(Errc::TypeMismatch, c, "operand dimensions differ");
    std::vector<std::pair<Cell, double>> cells;
    for (const Cell& cell : cells_of_tree(store, plan.space, plan.root, plan.space.r)) {
      double v = kNoValue;
      bool black = probe(store, alt.space, alt.root, cell, alt.space.r, &v);
      cells.emplace_back(cell, !black ? 0.0 : (v == kNoValue ? 1.0 : v));
    }
    plan.root = tree_of_labeled_cells(store, plan.space, cells, plan.space.r);
    plan.pyramid = true;
    bind_tree(c, plan, 1);
  } else if (name == "KDCRPY") {
    need(c, 3);
    double value = getr(c, 0);
    std::string color = name_of(c, 1);
    SpaceSpec sp(int(geti(c, 2)), 0);
    NodeRef root = store.white();
    if (color == "NOIR" || color == "BLACK")
      root = value != 0.0 ? store.black_val(value) : store.black();
    else if (color != "BLANC" && color != "WHITE")
      bad(Errc::TypeMismatch, c, "color must be BLANC or NOIR");
    bind(c, TreeVal{root, sp, root != kWhite && store.is_valued(root)});
  }
  // --- inductive limit ---
  else if (name == "KDCTIL") {
    need_min(c, 3);
    int k = int(geti(c, 0));
    int r = int(geti(c, 1));
    need(c, std::size_t(k) + 2);
    bind(c, il_create(store, k, r, reals(c, 2, std::size_t(k))));
  } else if (name == "KDAVIL") {
    need_min(c, 2);
    ILimit il = getv<ILimit>(c, 0, "inductive element");
    il_add(store, il, reals(c, 1, c.args.size() - 1));
    vars[c.result.empty() ? name_of(c, 0) : c.result] = std::move(il);
  } else if (name == "KDAIVT" || name == "KDARVT" || name == "KDARVP") {
    need_min(c, 3);
    TreeVal tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    std::size_t k = std::size_t(tv.space.k);
    if (name == "KDAIVT") {
      need(c, 2 + k);
      Cell cell(k);
      for (std::size_t i = 0; i < k; ++i) cell[i] = std::uint32_t(geti(c, 2 + i));
      tv.root = add_cell(store, tv.space, tv.root, cell);
    } else if (name == "KDARVT") {
      need(c, 2 + k);
      tv.root = add_vector(store, tv.space, tv.root, reals(c, 2, k));
    } else {
      need(c, 3 + k);
      tv.root = add_vector(store, tv.space, tv.root, reals(c, 2, k), getr(c, 2 + k));
      tv.pyramid = true;
    }
    bind_tree(c, tv);
  } else if (name == "KDUNIL" || name == "KDINIL" || name == "KDDFIL" || name == "KDEXIL") {
    need(c, 3);
    const ILimit& a = getv<ILimit>(c, 0, "inductive element");
    const ILimit& b = getv<ILimit>(c, 1, "inductive element");
    IlOp op = name == "KDUNIL"   ? IlOp::Union
              : name == "KDINIL" ? IlOp::Intersect
              : name == "KDDFIL" ? IlOp::Diff
                                 : IlOp::Exclude;
    bind(c, il_boolean(store, a, b, op, int(geti(c, 2))));
  }
  // --- moments and eigen frames ---
  else if (name == "KDMOMG") {
    need(c, 3);
    const TreeVal& tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    bind(c, MomentsVal{moments(store, tv.space, tv.root, p), {}, false});
  } else if (name == "KDCTRM") {
    need(c, 2);
    MomentsVal mv = centered(c, getv<MomentsVal>(c, 0, "moment list"));
    vars[c.result.empty() ? name_of(c, 0) : c.result] = std::move(mv);
  } else if (name == "KDNRMG") {
    need(c, 2);
    MomentsVal mv = getv<MomentsVal>(c, 0, "moment list");
    double mass = mv.list.mass();
    if (mass == 0.0) bad(Errc::ZeroMass, c, "empty moment list");
    for (auto& [idx, v] : mv.list.m) v /= mass;
    vars[c.result.empty() ? name_of(c, 0) : c.result] = std::move(mv);
  } else if (name == "KDNRMR") {
    need(c, 4);
    const MomentsVal& raw = getv<MomentsVal>(c, 0, "moment list");
    EigenFrame frame = frame_of(c, raw);
    MomentsVal norm = centered(c, raw);
    double mass = norm.list.mass();
    for (auto& [idx, v] : norm.list.m) v /= mass;
    vars[name_of(c, 1)] = std::move(norm);
    vars[name_of(c, 2)] = std::move(frame);
  } else if (name == "KDAPTR") {
    need(c, 6);
    const TreeVal& tv = gettree(c, 0);
    getv<MomentsVal>(c, 1, "moment list");
    const EigenFrame& frame = getv<EigenFrame>(c, 2, "frame");
    check_dim(c, 3, tv.space);
    int pin = getprec(c, 4, tv.space);
    int pout = getprec(c, 5, tv.space);
    bind(c, TreeVal{eigen_tree(store, tv.space, tv.root, frame, pin, pout, false), tv.space,
                    false});
  } else if (name == "KDEIGT") {
    need_min(c, 3);
    const TreeVal& tv = gettree(c, 0);
    check_dim(c, 1, tv.space);
    int p = getprec(c, 2, tv.space);
    int pout = c.args.size() > 3 ? getprec(c, 3, tv.space) : p;
    EigenFrame frame = frame_of(c, MomentsVal{moments(store, tv.space, tv.root, p), {}, false});
    bind(c, TreeVal{eigen_tree(store, tv.space, tv.root, frame, p, pout, false), tv.space,
                    false});
  }
  // --- segment forest ---
  else if (name == "KDBSGT") {
    need(c, 2);
    std::string listname = name_of(c, 0);
    const TreeVal& tv = gettree(c, 1);
    vars[listname] =
        ForestVal{segment_forest(store, tv.space, tv.root, tv.space.r), tv.space, 0};
  } else if (name == "KDEXSG") {
    need(c, 2);
    std::string listname = name_of(c, 0);
    auto itv = vars.find(listname);
    if (itv == vars.end()) bad(Errc::TypeMismatch, c, "unbound variable '" + listname + "'");
    auto* fv = std::get_if<ForestVal>(&itv->second);
    if (!fv) bad(Errc::TypeMismatch, c, "expected a segment forest");
    check_dim(c, 1, fv->space);
    if (fv->next >= fv->trees.size()) bad(Errc::IndexOutOfRange, c, "forest exhausted");
    bind(c, TreeVal{fv->trees[fv->next++], fv->space, false});
  } else if (name == "KDLLCC") {
    need(c, 2);
    const ForestVal& fv = getv<ForestVal>(c, 0, "segment forest");
    check_dim(c, 1, fv.space);
    if (fv.trees.empty()) bad(Errc::IndexOutOfRange, c, "empty forest");
    bind(c, TreeVal{fv.trees.front(), fv.space, false});
  }
  // --- classification ---
  else if (name == "KDRADT") {
    need_min(c, 3);
    std::size_t m = std::size_t(geti(c, 0));
    need(c, 2 + m);
    int rp = int(geti(c, 1));
    std::vector<TreeVal> resp;
    for (std::size_t i = 0; i < m; ++i) resp.push_back(gettree(c, 2 + i));
    SpaceSpec rsp(int(m), rp);
    NodeRef radio = store.white();
    for (const Cell& cell :
         cells_of_tree(store, resp[0].space, support(store, resp[0].space, resp[0].root),
                       resp[0].space.r)) {
      std::vector<double> point(m);
      for (std::size_t i = 0; i < m; ++i) {
        double v = kNoValue;
        probe(store, resp[i].space, resp[i].root, cell, resp[i].space.r, &v);
        point[i] = v == kNoValue ? 0.0 : v;
      }
      radio = add_vector(store, rsp, radio, point);
    }
    bind(c, TreeVal{radio, rsp, false});
  } else if (name == "KDCVMT") {
    need_min(c, 4);
    std::size_t m = std::size_t(geti(c, 0));
    need(c, 4 + m);
    Metric metric = geti(c, 1) == 0 ? Metric::Dinf : Metric::D1;
    std::vector<NodeRef> resp;
    SpaceSpec sp(1, 0);
    for (std::size_t i = 0; i < m; ++i) {
      const TreeVal& tv = gettree(c, 4 + i);
      resp.push_back(tv.root);
      sp = tv.space;
    }
    int p = int(geti(c, 2)), rp = int(geti(c, 3));
    sp.check_precision(p);
    Components comps = classify(store, sp, resp, metric, p, rp);
    bind(c, TreeVal{comps.labeled, sp, true});
  }
  // --- variables ---
  else if (name == "KDINVR" || name == "KDMDVR") {
    need_min(c, 3);
    std::string var = name_of(c, 0);
    std::string tag = name_of(c, 1);
    if (name == "KDMDVR" && !vars.count(var))
      bad(Errc::TypeMismatch, c, "variable '" + var + "' does not exist");
    std::size_t last = c.args.size() - 1;
    if (tag == "MQREEL" || tag == "MQREAL")
      vars[var] = getr(c, last);
    else if (tag == "MQBOOL")
      vars[var] = geti(c, last) != 0;
    else
      vars[var] = geti(c, last);
  } else if (name == "KDCPVR") {
    need(c, 2);
    vars[name_of(c, 1)] = lookup(c, name_of(c, 0));
  } else if (name == "KDRNVR") {
    need(c, 2);
    std::string from = name_of(c, 0);
    Value v = lookup(c, from);
    vars.erase(from);
    vars[name_of(c, 1)] = std::move(v);
  } else if (name == "KDSUVR") {
    need(c, 1);
    vars.erase(name_of(c, 0));
  } else if (name == "KDEXVR") {
    need(c, 1);
    bool e = vars.count(name_of(c, 0)) > 0;
    bind_opt(c, e, e ? "exists" : "does not exist");
  } else if (name == "KDLSVR") {
    need(c, 1);
    log.push_back(name_of(c, 0) + ": " + describe(lookup(c, name_of(c, 0))));
  } else if (name == "KDPRVR") {
    for (const auto& [n, v] : vars) log.push_back(n + ": " + value_type_name(v));
  } else if (name == "KDDCVR" || name == "KDVCVR") {
    log.push_back(c.name + ": variable table coherent");
  }
  // --- checks ---
  else if (name == "KDTBIN" || name == "KDTBTR" || name == "KDTBTV" || name == "KDTBNV" ||
           name == "KDTPYR" || name == "KDTVAR") {
    need(c, 1);
    const Value& v = lookup(c, name_of(c, 0));
    const TreeVal* tv = std::get_if<TreeVal>(&v);
    bool ok;
    if (name == "KDTVAR")
      ok = v.index() <= 2;
    else if (!tv)
      ok = false;
    else if (name == "KDTBIN")
      ok = true;
    else if (name == "KDTPYR")
      ok = tv->pyramid || store.is_valued(tv->root);
    else if (name == "KDTBTV")
      ok = store.is_valued(tv->root);
    else
      ok = !store.is_valued(tv->root); // KDTBTR / KDTBNV
    bind_opt(c, ok, ok ? "true" : "false");
  } else if (name == "KDEXCI") {
    need(c, 1);
    long long n = geti(c, 0);
    if (n <= 0) bad(Errc::IndexOutOfRange, c, "needs a positive integer");
    long long bit = 0;
    while (n >> (bit + 1)) ++bit;
    bind_opt(c, bit, "most significant bit " + std::to_string(bit));
  }
  // --- control and listings ---
  else if (name == "KDEND" || name == "KDSTOP") {
    stopped = true;
  } else if (name == "KDPAUS") {
    log.push_back("pause skipped");
  } else if (name == "KDLSST" || name == "KDLGST") {
    need(c, 1);
    const Value& v = lookup(c, name_of(c, 0));
    if (name == "KDLSST") {
      log.push_back(name_of(c, 0) + ": " + describe(v));
    } else {
      long long n = 0;
      if (auto* fv = std::get_if<ForestVal>(&v))
        n = (long long)fv->trees.size();
      else if (auto* mv = std::get_if<MomentsVal>(&v))
        n = (long long)mv->list.m.size();
      else if (auto* vv = std::get_if<VectorVal>(&v))
        n = (long long)vv->v.size();
      else if (auto* tv = std::get_if<TreeVal>(&v))
        n = (long long)cell_count(store, tv->space, tv->root, tv->space.r);
      bind_opt(c, n, "length " + std::to_string(n));
    }
  } else if (name == "KDPRBT") {
    need(c, 1);
    const TreeVal& tv = gettree(c, 0);
    TreeCode tc = encode(store, tv.root);
    std::string head = tc.code.substr(0, 120);
    log.push_back(name_of(c, 0) + ": code[" + std::to_string(tc.code.size()) + "] " + head +
                  (tc.code.size() > head.size() ? "..." : ""));
  }
  // --- display ---
  else if (name == "KDNWGR") {
    need(c, 1);
    cur_win = int(geti(c, 0));
  } else if (name == "KDERGR") {
    Window& w = window();
    std::fill(w.canvas.pixels.begin(), w.canvas.pixels.end(), 0.0);
  } else if (name == "KDDSGR") {
    windows.erase(cur_win);
  } else if (name == "KDMSGR") {
    need(c, 1);
    window().title = name_of(c, 0);
  } else if (name == "KDQTGR" || name == "KDPYGR") {
    need(c, 2);
    const TreeVal& tv = gettree(c, 0);
    int p = getprec(c, 1, tv.space);
    draw(tv, p);
    emit();
  }
  // --- io ---
  else if (name == "KDRDBT" || name == "KDRDPY" || name == "KDIMPY") {
    need(c, 1);
    bind(c, load(c, name_of(c, 0), name != "KDRDBT"));
  } else if (name == "KDWRBT" || name == "KDWRPY") {
    need(c, 2);
    save(c, gettree(c, 0), name_of(c, 1));
  } else {
    return false;
  }
  return true;
}

void Interp::Impl::dispatch(const Command& c) {
  const auto& reg = command_registry();
  auto it = reg.find(c.name);
  if (it == reg.end()) bad(Errc::UnknownCommand, c, "unknown command");
  if (it->second == CmdClass::OutOfScope)
    bad(Errc::NotImplemented, c, "outside the library scope");
  if (it->second == CmdClass::DisplayStub) {
    log.push_back(c.name + ": display directive ignored");
    return;
  }
  std::string name = c.name;
  auto al = alias_map().find(name);
  if (al != alias_map().end()) name = al->second;
  if (!exec_misc(c, name)) exec_tree_cmd(c, name);
}

Interp::Interp(std::string out_dir, bool keep_going) : impl_(new Impl) {
  impl_->out_dir = std::move(out_dir);
  impl_->keep_going = keep_going;
}

Interp::~Interp() { delete impl_; }

TreeStore& Interp::store() { return impl_->store; }
VarTable& Interp::vars() { return impl_->vars; }
const std::vector<std::string>& Interp::log() const { return impl_->log; }

ExecReport Interp::run(const std::vector<Command>& cmds, const std::string& base_dir) {
  impl_->base_dir = base_dir;
  ExecReport report;
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    CommandStatus st;
    st.index = int(i);
    st.name = cmds[i].name;
    try {
      impl_->dispatch(cmds[i]);
    } catch (const Error& e) {
      st.ok = false;
      st.message = e.what();
      ++report.errors;
    }
    report.statuses.push_back(std::move(st));
    if (!report.statuses.back().ok && !impl_->keep_going) break;
    if (impl_->stopped) {
      report.stopped = true;
      break;
    }
  }
  return report;
}

ExecReport Interp::run_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::FileNotFound, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto cmds = parse_command_stream(buf.str());
  return run(cmds, fs::path(path).parent_path().string());
}

} // namespace kdt
