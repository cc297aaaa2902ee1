#include "s2pc/cli.hpp"

int main(int argc, char** argv) { return s2pc::cli_main(argc, argv); }
