#include "thatsort_cli.hpp"

int main(int argc, char** argv) {
  return thatsort::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
