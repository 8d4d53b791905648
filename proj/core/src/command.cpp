#include "kdt/command.hpp"

#include <cctype>
#include <sstream>

#include "kdt/error.hpp"

namespace kdt {

namespace {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& t) : text(t) {}

  [[noreturn]] void err(int l, int c, const std::string& expected) const {
    std::ostringstream msg;
    msg << "line " << l << ", column " << c << ": expected " << expected;
    fail(Errc::SyntaxError, msg.str());
  }

  char peek() const { return pos < text.size() ? text[pos] : '\0'; }

  char advance() {
    char c = text[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }

  void skip() {
    for (;;) {
      while (pos < text.size() && std::isspace(unsigned(peek()))) advance();
      if (peek() == '/' && pos + 1 < text.size() && text[pos + 1] == '*') {
        int l = line, c = col;
        advance();
        advance();
        for (;;) {
          if (pos >= text.size()) err(l, c, "closing */ for comment");
          if (peek() == '*' && pos + 1 < text.size() && text[pos + 1] == '/') {
            advance();
            advance();
            break;
          }
          advance();
        }
        continue;
      }
      return;
    }
  }

  bool at_end() {
    skip();
    return pos >= text.size();
  }

  bool ident_start(char c) const { return std::isalpha(unsigned(c)) || c == '_'; }
  bool ident_char(char c) const { return std::isalnum(unsigned(c)) || c == '_'; }
  bool number_start(char c) const {
    return std::isdigit(unsigned(c)) || c == '+' || c == '-' || c == '.';
  }

  std::string ident(const std::string& what) {
    skip();
    if (!ident_start(peek())) err(line, col, what);
    std::string out;
    while (pos < text.size() && ident_char(peek())) out += advance();
    return out;
  }

  Arg argument() {
    skip();
    int l = line, c = col;
    if (ident_start(peek())) {
      Arg a;
      a.kind = Arg::Kind::Ident;
      a.text = ident("argument");
      // file-name arguments may carry dotted extensions
      while (peek() == '.' && pos + 1 < text.size() && ident_char(text[pos + 1])) {
        a.text += advance();
        while (pos < text.size() && ident_char(peek())) a.text += advance();
      }
      return a;
    }
    if (!number_start(peek())) err(l, c, "argument (number or identifier)");
    std::string tok;
    bool real = false;
    if (peek() == '+' || peek() == '-') tok += advance();
    while (std::isdigit(unsigned(peek()))) tok += advance();
    if (peek() == '.') {
      real = true;
      tok += advance();
      while (std::isdigit(unsigned(peek()))) tok += advance();
    }
    if (peek() == 'e' || peek() == 'E') {
      real = true;
      tok += advance();
      if (peek() == '+' || peek() == '-') tok += advance();
      if (!std::isdigit(unsigned(peek()))) err(line, col, "exponent digits");
      while (std::isdigit(unsigned(peek()))) tok += advance();
    }
    bool digits = false;
    for (char ch : tok)
      if (std::isdigit(unsigned(ch))) digits = true;
    if (!digits) err(l, c, "numeric literal");
    Arg a;
    a.text = tok;
    if (real) {
      a.kind = Arg::Kind::Real;
      a.r = std::stod(tok);
    } else {
      a.kind = Arg::Kind::Integer;
      a.i = std::stoll(tok);
      a.r = double(a.i);
    }
    return a;
  }

  void expect(char c, const std::string& what) {
    skip();
    if (peek() != c) err(line, col, what);
    advance();
  }
};

} // namespace

std::vector<Command> parse_command_stream(const std::string& text) {
  Lexer lx(text);
  std::vector<Command> out;
  while (!lx.at_end()) {
    Command cmd;
    cmd.line = lx.line;
    cmd.column = lx.col;
    cmd.name = lx.ident("command name");
    lx.skip();
    if (lx.peek() == '(') {
      lx.advance();
      lx.skip();
      if (lx.peek() != ')') {
        for (;;) {
          cmd.args.push_back(lx.argument());
          lx.skip();
          if (lx.peek() == ',') {
            lx.advance();
            continue;
          }
          break;
        }
      }
      lx.expect(')', "closing parenthesis");
    }
    lx.skip();
    if (lx.peek() == '=') {
      lx.advance();
      cmd.result = lx.ident("result variable name");
    }
    lx.expect(';', "terminating semicolon");
    bool end = cmd.name == "KDEND";
    out.push_back(std::move(cmd));
    if (end) break; // anything after the end command is ignored
  }
  return out;
}

std::string print_command(const Command& c) {
  std::string out = c.name;
  if (!c.args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < c.args.size(); ++i) {
      if (i) out += ", ";
      out += c.args[i].text;
    }
    out += ')';
  }
  if (!c.result.empty()) {
    out += " = ";
    out += c.result;
  }
  out += ';';
  return out;
}

std::string print_commands(const std::vector<Command>& cs) {
  std::string out;
  for (const auto& c : cs) {
    out += print_command(c);
    out += '\n';
  }
  return out;
}

} // namespace kdt
