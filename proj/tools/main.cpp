#include <string>
#include <vector>

#include "fragrec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fragrec::run_cli(args);
}
