#include "rhtl/cli.hpp"

int main(int argc, char** argv) { return rhtl::run_cli(argc, argv); }
