#pragma once

#include <string>
#include <vector>

namespace kdt {

// One argument of a command: an immediate integer or real, or the name of a
// variable. The spelling is kept for printing round trips.
struct Arg {
  enum class Kind { Integer, Real, Ident };
  Kind kind = Kind::Ident;
  long long i = 0;
  double r = 0;
  std::string text;

  bool operator==(const Arg&) const = default;
};

// function(arg, ..., arg) = result ;  with both the argument list and the
// result binding optional.
struct Command {
  std::string name;
  std::vector<Arg> args;
  std::string result;
  int line = 0;
  int column = 0;

  bool operator==(const Command& o) const {
    return name == o.name && args == o.args && result == o.result;
  }
};

// Parses a whole command file: /* ... */ comments and whitespace are
// insignificant, the stream ends at KDEND (kept as the last command) and
// anything after it is ignored. Errors carry the line and column.
std::vector<Command> parse_command_stream(const std::string& text);

std::string print_command(const Command& c);
std::string print_commands(const std::vector<Command>& cs);

} // namespace kdt
