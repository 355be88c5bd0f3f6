#include "fhl_cli.hpp"

int main(int argc, char** argv) { return fhl::cli::run(argc, argv); }
