#include <string>
#include <vector>

#include "lob/cli.hpp"

int main(int argc, char** argv) {
  return lob::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
