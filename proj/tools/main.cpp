#include "dmd/cli.hpp"

int main(int argc, char** argv) { return dmd::cli_main(argc, argv); }
