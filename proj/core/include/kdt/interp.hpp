#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "kdt/attributes.hpp"
#include "kdt/command.hpp"
#include "kdt/geom.hpp"
#include "kdt/image.hpp"
#include "kdt/inductive.hpp"
#include "kdt/space.hpp"
#include "kdt/store.hpp"

namespace kdt {

// A tree or pyramid bound to a variable, together with its model space.
struct TreeVal {
  NodeRef root = kWhite;
  SpaceSpec space{1, 0};
  bool pyramid = false;
};

// A moment list, remembering the gravity center once it has been centered so
// later frame extraction can still translate.
struct MomentsVal {
  MomentList list;
  std::vector<double> xg;
  bool centered = false;
};

// The segment forest of a labeled tree, consumed front to back.
struct ForestVal {
  std::vector<NodeRef> trees;
  SpaceSpec space{1, 0};
  std::size_t next = 0;
};

struct VectorVal {
  std::vector<double> v;
};

using Value = std::variant<long long, double, bool, TreeVal, MomentsVal, ForestVal, VectorVal,
                           HomMatrix, EigenFrame, Polytope, ILimit>;

std::string value_type_name(const Value& v);

using VarTable = std::map<std::string, Value>;

// How an inventory name is covered: wired to a library operation, a synonym
// of another command, a logged no-op standing in for screen management, or
// deliberately outside the library (archive, session, raw-memory and
// container-primitive groups).
enum class CmdClass { Implemented, Aliased, DisplayStub, OutOfScope };

// Classification of every command name, aliases included.
const std::map<std::string, CmdClass>& command_registry();

struct CommandStatus {
  int index = 0;
  std::string name;
  bool ok = true;
  std::string message;
};

struct ExecReport {
  std::vector<CommandStatus> statuses;
  int errors = 0;
  bool stopped = false; // KDEND or KDSTOP reached
};

// Sequential interpreter: one variable table per session. Display commands
// paint per-window canvases and emit numbered PBM/PGM files into out_dir;
// read commands resolve paths against the command file's directory.
class Interp {
public:
  explicit Interp(std::string out_dir = ".", bool keep_going = false);
  ~Interp();

  ExecReport run(const std::vector<Command>& cmds, const std::string& base_dir = ".");
  ExecReport run_file(const std::string& path);

  TreeStore& store();
  VarTable& vars();
  const std::vector<std::string>& log() const;

private:
  struct Impl;
  Impl* impl_;
};

} // namespace kdt
