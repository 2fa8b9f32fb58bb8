#include "fano_forge/cli.hpp"

int main(int argc, char** argv) { return fano_forge::cli::run(argc, argv); }
