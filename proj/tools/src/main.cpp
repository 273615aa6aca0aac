#include <iostream>

#include "smfg/app/cli.hpp"

int main(int argc, char** argv) {
  return smfg::app::run_cli(argc, argv, std::cout, std::cerr);
}
