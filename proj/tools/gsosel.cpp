#include <cstdio>
#include <iostream>

#include <unistd.h>

#include "gsosel/cli.hpp"

int main(int argc, char** argv) {
  return gsosel::cli::run_cli(argc, argv, std::cout, std::cerr, isatty(fileno(stderr)) != 0);
}
