#include <string>
#include <vector>

#include "pitch3d/cli.hpp"

int main(int argc, char** argv) {
  return pitch3d::cli::run(std::vector<std::string>(argv, argv + argc));
}
