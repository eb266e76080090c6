#include "pfa/cli.hpp"

int main(int argc, char** argv) { return pfa::cli::run(argc, argv); }
