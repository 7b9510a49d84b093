#include "kgsym/cli.hpp"

int main(int argc, char** argv) { return kgsym::run_cli(argc, argv); }
