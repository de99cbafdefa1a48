#include "mpst/cli.hpp"

int main(int argc, char** argv) { return mpst::cli::run(argc, argv); }
