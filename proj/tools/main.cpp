#include <iostream>
#include <string>
#include <vector>

#include "emocnn/cli.hpp"

int main(int argc, char** argv) {
  return emocnn::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
