#include "factgraph/cli/run.hpp"

int main(int argc, char** argv) { return factgraph::cli::run_cli(argc, argv); }
