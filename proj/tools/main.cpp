#include "cli.hpp"

int main(int argc, char** argv) { return fgw::cli::cli_main(argc, argv); }
