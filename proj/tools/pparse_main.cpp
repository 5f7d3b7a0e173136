#include <string>
#include <vector>

#include "pparse/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pparse::cli::run(std::move(args));
}
