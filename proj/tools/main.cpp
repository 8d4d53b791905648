#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "kdt/interp.hpp"

int main(int argc, char** argv) {
  CLI::App app{"2^k-tree modeling interpreter"};
  app.require_subcommand(1);

  std::string file, out_dir = ".";
  bool trace = false, keep_going = false;
  CLI::App* run = app.add_subcommand("run", "execute a command file");
  run->add_option("file", file, "command file")->required()->check(CLI::ExistingFile);
  run->add_option("--out-dir", out_dir, "directory for emitted images and archives");
  run->add_flag("--trace", trace, "print one status line per command");
  run->add_flag("--keep-going", keep_going, "continue after command errors");

  CLI11_PARSE(app, argc, argv);

  try {
    kdt::Interp interp(out_dir, keep_going);
    kdt::ExecReport report = interp.run_file(file);
    if (trace) {
      for (const auto& st : report.statuses)
        std::cout << st.index << " " << st.name << " " << (st.ok ? "ok" : "error") << " "
                  << st.message << "\n";
      for (const auto& line : interp.log()) std::cout << "# " << line << "\n";
    }
    if (report.errors) {
      for (const auto& st : report.statuses)
        if (!st.ok) std::cerr << st.name << ": " << st.message << "\n";
      return 1;
    }
    return 0;
  } catch (const kdt::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
