#include "ehd/cli.hpp"

int main(int argc, char** argv) { return ehd::cli_main(argc, argv); }
