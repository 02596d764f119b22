#include "kcav/cli.hpp"

int main(int argc, char** argv) { return kcav::cli_main(argc, argv); }
