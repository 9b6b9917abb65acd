#include "ttergm/cli.hpp"

int main(int argc, char** argv) { return ttergm::run_cli(argc, argv); }
