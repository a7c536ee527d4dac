#include "csfs/cli.hpp"

int main(int argc, char** argv) { return csfs::cli_main(argc, argv); }
