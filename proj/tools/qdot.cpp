#include "cli/cli.hpp"

int main(int argc, char** argv) { return qdot::cli::run(argc, argv); }
