#include <iostream>

#include "pagerel/cli.h"

int main(int argc, char** argv) {
  return pagerel::RunCli(argc, argv, std::cout, std::cerr);
}
