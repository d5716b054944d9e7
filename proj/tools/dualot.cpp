#include "dualot/cli/commands.hpp"

int main(int argc, char** argv) { return dualot::cli::run_cli(argc, argv); }
