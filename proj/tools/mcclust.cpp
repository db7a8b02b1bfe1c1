#include "mcclust_cli.hpp"

int main(int argc, char** argv) {
  return mcc::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
