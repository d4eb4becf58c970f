#include "patp/cli.hpp"

int main(int argc, char** argv) { return patp::cli_main(argc, argv); }
